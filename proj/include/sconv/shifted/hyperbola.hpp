// Smooth hyperbola method: d(n) = sum_{delta | n} w(delta/sqrt Q)(2 - w(n/(delta sqrt Q)))
// for n < Q, and the kernel K_{r,q}.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "sconv/specialfn/bump.hpp"

namespace sconv::shifted {

class HyperbolaState {
 public:
  explicit HyperbolaState(double Q) : Q_(Q), sqrtQ_(std::sqrt(Q)), omega_(special::hyperbola_omega()) {
    if (!(Q > 0.0)) throw std::invalid_argument("HyperbolaState: Q must be positive");
  }

  double Q() const { return Q_; }
  double sqrtQ() const { return sqrtQ_; }
  const special::SmoothBump& omega() const { return omega_; }

  double omega(double t) const { return t <= 1.0 ? 1.0 : omega_(t); }

  /// The smoothed divisor count; equals d(n) for n < Q.
  double divisor_sum(std::int64_t n) const {
    double s = 0.0;
    for (std::int64_t a = 1; a * a <= n; ++a) {
      if (n % a) continue;
      s += term(a, n / a);
      if (a != n / a) s += term(n / a, a);
    }
    return s;
  }

  /// K_{r,q}(t) = sum_delta delta^{-1} w(q delta/(r sqrt Q))(2 - w(r t/(delta q sqrt Q))).
  double K(std::int64_t r, std::int64_t q, double t) const {
    if (q >= support_bound(r)) return 0.0;
    const double rq = static_cast<double>(r) / q;
    double s = 0.0;
    for (std::int64_t d = 1;; ++d) {
      const double a = omega(d / (rq * sqrtQ_));
      if (a == 0.0) break;
      s += a * (2.0 - omega(rq * t / (d * sqrtQ_))) / d;
    }
    return s;
  }

  /// K_{r,q} vanishes for q >= 2 r sqrt Q.
  double support_bound(std::int64_t r) const { return 2.0 * r * sqrtQ_; }

 private:
  double term(std::int64_t delta, std::int64_t cofactor) const {
    return omega(delta / sqrtQ_) * (2.0 - omega(cofactor / sqrtQ_));
  }

  double Q_, sqrtQ_;
  special::SmoothBump omega_;
};

}  // namespace sconv::shifted
