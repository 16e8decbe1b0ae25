// Compactly supported smooth bumps, the normalized weight w of the delta
// decomposition, the dyadic partition of unity and the hyperbola cutoff.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "sconv/specialfn/jet.hpp"

namespace sconv::special {

inline constexpr int kMaxBumpOrder = 8;
using BumpJet = Jet<kMaxBumpOrder>;

namespace detail {

// exp(-1/tau) for tau > 0, as a jet in the underlying variable.
template <int N>
Jet<N> exp_inv(const Jet<N>& tau) {
  if (tau.c[0] <= 1.0 / 700.0) return Jet<N>{};
  return exp(reciprocal(tau) * -1.0);
}

// 0 for tau <= 0, 1 for tau >= 1, smooth in between.
template <int N>
Jet<N> step(const Jet<N>& tau) {
  if (tau.c[0] <= 0.0) return Jet<N>{};
  if (tau.c[0] >= 1.0) return Jet<N>::constant(1.0);
  const Jet<N> a = exp_inv(tau);
  const Jet<N> b = exp_inv(1.0 - tau);
  if (a.c[0] == 0.0) return Jet<N>{};
  if (b.c[0] == 0.0) return Jet<N>::constant(1.0);
  return a / (a + b);
}

}  // namespace detail

/// Smooth function supported on [alpha, beta], identically 1 on the plateau
/// [alpha', beta'].  With an empty plateau the profile is exp(1 - 1/(1 - t^2)).
class SmoothBump {
 public:
  static SmoothBump standard(double alpha, double beta) {
    if (!(beta > alpha)) throw std::invalid_argument("SmoothBump: empty support");
    SmoothBump b(alpha, beta, 0.5 * (alpha + beta), 0.5 * (alpha + beta), false);
    return b;
  }

  /// alpha' == alpha means no rising edge (value 1 from alpha on); likewise
  /// beta' == beta means no falling edge.
  static SmoothBump plateau(double alpha, double alpha_p, double beta_p, double beta) {
    if (!(alpha <= alpha_p && alpha_p <= beta_p && beta_p <= beta && alpha < beta))
      throw std::invalid_argument("SmoothBump: need alpha <= alpha' <= beta' <= beta");
    return SmoothBump(alpha, beta, alpha_p, beta_p, true);
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double plateau_lo() const { return alpha_p_; }
  double plateau_hi() const { return beta_p_; }
  bool has_plateau() const { return glued_; }

  /// Narrowest transition length; derivative bounds scale with its powers.
  double transition_width() const {
    if (!glued_) return 0.5 * (beta_ - alpha_);
    double w = 0.0;
    if (alpha_p_ > alpha_) w = alpha_p_ - alpha_;
    if (beta_ > beta_p_) w = (w == 0.0) ? beta_ - beta_p_ : std::min(w, beta_ - beta_p_);
    return w == 0.0 ? beta_ - alpha_ : w;
  }

  template <int N>
  Jet<N> jet(double x) const {
    if (x <= alpha_ && !(glued_ && alpha_p_ == alpha_ && x == alpha_)) return Jet<N>{};
    if (x >= beta_ && !(glued_ && beta_p_ == beta_ && x == beta_)) return Jet<N>{};
    const Jet<N> xv = Jet<N>::variable(x);
    if (!glued_) {
      const double half = 0.5 * (beta_ - alpha_);
      const Jet<N> t = (xv - 0.5 * (alpha_ + beta_)) * (1.0 / half);
      const Jet<N> one_minus = 1.0 - t * t;
      if (one_minus.c[0] <= 0.0) return Jet<N>{};
      const double expo = 1.0 - 1.0 / one_minus.c[0];
      if (expo < -700.0) return Jet<N>{};
      return exp(1.0 - reciprocal(one_minus));
    }
    Jet<N> r = Jet<N>::constant(1.0);
    if (alpha_p_ > alpha_) r = r * detail::step((xv - alpha_) * (1.0 / (alpha_p_ - alpha_)));
    if (beta_ > beta_p_) r = r * detail::step((beta_ - xv) * (1.0 / (beta_ - beta_p_)));
    return r;
  }

  double operator()(double x) const { return jet<0>(x).c[0]; }

  double derivative(double x, int order) const {
    if (order < 0 || order > kMaxBumpOrder) throw std::invalid_argument("SmoothBump: order out of range");
    return jet<kMaxBumpOrder>(x).derivative(order);
  }

  /// C_i = max |B^{(i)}| * width^i over a dense sample grid.
  const std::array<double, kMaxBumpOrder + 1>& certificate() const { return cert_; }
  /// max |B^{(i)}| over the same grid.
  double max_derivative(int i) const { return cert_[i] / std::pow(transition_width(), i); }

 private:
  SmoothBump(double a, double b, double ap, double bp, bool glued)
      : alpha_(a), beta_(b), alpha_p_(ap), beta_p_(bp), glued_(glued) {
    compute_certificate();
  }

  void compute_certificate() {
    cert_.fill(0.0);
    constexpr int samples = 8000;
    const double w = transition_width();
    for (int s = 1; s < samples; ++s) {
      const double x = alpha_ + (beta_ - alpha_) * s / samples;
      const BumpJet j = jet<kMaxBumpOrder>(x);
      for (int i = 0; i <= kMaxBumpOrder; ++i)
        cert_[i] = std::max(cert_[i], std::abs(j.derivative(i)) * std::pow(w, i));
    }
  }

  double alpha_, beta_, alpha_p_, beta_p_;
  bool glued_;
  std::array<double, kMaxBumpOrder + 1> cert_{};
};

/// The cutoff omega: 1 on [0, 1], 0 on [2, inf).
inline SmoothBump hyperbola_omega() { return SmoothBump::plateau(0.0, 0.0, 1.0, 2.0); }

/// w(u) = c psi(|u|/Q)/Q, even, supported on Q <= |u| <= 2Q, with sum_{q >= 1} w(q) = 1.
class DeltaWeight {
 public:
  DeltaWeight(double Q, SmoothBump psi) : Q_(Q), psi_(std::move(psi)) {
    if (!(Q > 0.0)) throw std::invalid_argument("DeltaWeight: Q must be positive");
    if (psi_.alpha() < 1.0 || psi_.beta() > 2.0)
      throw std::invalid_argument("DeltaWeight: base bump must live in [1, 2]");
    double s = 0.0;
    const auto q_lo = static_cast<long long>(std::ceil(Q));
    const auto q_hi = static_cast<long long>(std::floor(2.0 * Q));
    for (long long q = q_lo; q <= q_hi; ++q) s += psi_(static_cast<double>(q) / Q);
    if (!(s > 0.0)) throw std::invalid_argument("DeltaWeight: no integer in [Q, 2Q] carries weight");
    norm_ = Q / s;
  }

  double Q() const { return Q_; }
  double normalization() const { return norm_; }
  const SmoothBump& base() const { return psi_; }

  double operator()(double u) const { return norm_ * psi_(std::abs(u) / Q_) / Q_; }

  template <int N>
  Jet<N> jet(double u) const {
    const double sgn = u < 0.0 ? -1.0 : 1.0;
    Jet<N> j = psi_.jet<N>(std::abs(u) / Q_);
    double scale = norm_ / Q_;
    for (int k = 0; k <= N; ++k) {
      j.c[k] *= scale;
      scale *= sgn / Q_;
    }
    return j;
  }

  double derivative(double u, int order) const { return jet<kMaxBumpOrder>(u).derivative(order); }

  /// C_i with |w^{(i)}| <= C_i / Q^{i+1}.
  double certificate(int i) const { return norm_ * psi_.max_derivative(i); }

 private:
  double Q_;
  SmoothBump psi_;
  double norm_ = 1.0;
};

inline DeltaWeight build_delta_weight(double Q, const SmoothBump& psi) { return DeltaWeight(Q, psi); }
inline DeltaWeight build_delta_weight(double Q) { return DeltaWeight(Q, SmoothBump::standard(1.0, 2.0)); }

/// rho(t) = s(t) - s(t / sqrt 2) for a smooth step s rising on [1, sqrt 2];
/// supported in [1, 2] and sum_k rho(2^{-k/2} x) telescopes to 1.
class DyadicPartition {
 public:
  template <int N>
  Jet<N> jet(double t) const {
    const Jet<N> x = Jet<N>::variable(t);
    const double w = std::numbers::sqrt2 - 1.0;
    const Jet<N> a = detail::step((x - 1.0) * (1.0 / w));
    const Jet<N> b = detail::step((x * (1.0 / std::numbers::sqrt2) - 1.0) * (1.0 / w));
    return a - b;
  }

  double operator()(double t) const {
    if (t <= 1.0 || t >= 2.0) return 0.0;
    return jet<0>(t).c[0];
  }

  double derivative(double t, int order) const {
    if (t <= 1.0 || t >= 2.0) return 0.0;
    return jet<kMaxBumpOrder>(t).derivative(order);
  }

  /// sum_k rho(2^{-k/2} x) over the (at most three) contributing k.
  double partition_sum(double x) const {
    const double l = 2.0 * std::log2(x);
    const int k_lo = static_cast<int>(std::floor(l - 2.0)) - 1;
    const int k_hi = static_cast<int>(std::ceil(l)) + 1;
    double s = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) s += (*this)(std::exp2(-0.5 * k) * x);
    return s;
  }
};

}  // namespace sconv::special
