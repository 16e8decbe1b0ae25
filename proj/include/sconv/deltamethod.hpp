// The delta-method: Delta_q, the exact decomposition
// delta(m) = sum_q c_q(m) Delta_q(m), and the kernel
// E(x, y, q) = f(x, y) phi(x - y - h) Delta_q(x - y - h) with partials.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "sconv/common.hpp"
#include "sconv/expsums.hpp"
#include "sconv/shifted/test_function.hpp"
#include "sconv/specialfn.hpp"

namespace sconv::delta {

using special::DeltaWeight;
using special::Jet;
using special::SmoothBump;

inline double default_Q(double X, double eps = 0.05) { return std::pow(X, 0.5 + eps); }

class DeltaKernel {
 public:
  explicit DeltaKernel(DeltaWeight w) : w_(std::move(w)) {}
  explicit DeltaKernel(double Q) : w_(special::build_delta_weight(Q)) {}

  double Q() const { return w_.Q(); }
  const DeltaWeight& weight() const { return w_; }

  /// Largest q with Delta_q not identically zero on |u| <= u_max.
  std::int64_t q_max(double u_max = 0.0) const {
    return static_cast<std::int64_t>(std::floor(std::max(2.0 * Q(), std::abs(u_max) / Q())));
  }

  /// A_q = sum_r w(qr)/(qr).
  double constant_part(std::int64_t q) const {
    const auto r_lo = static_cast<std::int64_t>(std::ceil(Q() / q));
    const auto r_hi = static_cast<std::int64_t>(std::floor(2.0 * Q() / q));
    double s = 0.0;
    for (std::int64_t r = std::max<std::int64_t>(r_lo, 1); r <= r_hi; ++r) {
      const double n = static_cast<double>(q * r);
      s += w_(n) / n;
    }
    return s;
  }

  /// Taylor jet of Delta_q at real u.
  template <int N>
  Jet<N> jet(std::int64_t q, double u, double A_q) const {
    Jet<N> j = Jet<N>::constant(A_q);
    const double au = std::abs(u);
    if (au == 0.0) return j;
    const auto r_lo = static_cast<std::int64_t>(std::ceil(au / (2.0 * Q() * q)));
    const auto r_hi = static_cast<std::int64_t>(std::floor(au / (Q() * q)));
    for (std::int64_t r = std::max<std::int64_t>(r_lo, 1); r <= r_hi; ++r) {
      const double n = static_cast<double>(q * r);
      Jet<N> wj = w_.jet<N>(u / n);
      double s = 1.0 / n;
      for (int k = 0; k <= N; ++k) {
        j.c[k] -= wj.c[k] * s;
        s /= n;
      }
    }
    return j;
  }

  double operator()(std::int64_t q, double u) const { return jet<0>(q, u, constant_part(q)).c[0]; }

 private:
  DeltaWeight w_;
};

inline double delta_q(const DeltaKernel& k, std::int64_t q, std::int64_t m) {
  if (q < 1) throw std::invalid_argument("delta_q: q must be >= 1");
  return k(q, static_cast<double>(m));
}

/// sum_q c_q(m) Delta_q(m) over every q with Delta_q(m) != 0.
inline double delta_symbol(const DeltaKernel& k, std::int64_t m) {
  const std::int64_t qm = k.q_max(static_cast<double>(m));
  KahanSum<double> s;
  for (std::int64_t q = 1; q <= qm; ++q) {
    const double d = k(q, static_cast<double>(m));
    if (d == 0.0) continue;
    s.add(expsums::ramanujan_sum(m, q) * d);
  }
  return s.value();
}

/// E(x, y, q) = f(x, y) phi(x - y - h) Delta_q(x - y - h), with phi equal to 1
/// on [-X/2, X/2] and supported on [-X, X].
class ShiftKernelE {
 public:
  ShiftKernelE(shifted::TestFunction f, std::int64_t h, DeltaKernel kernel)
      : f_(std::move(f)),
        phi_(SmoothBump::plateau(-f_.X(), -0.5 * f_.X(), 0.5 * f_.X(), f_.X())),
        h_(h),
        kernel_(std::move(kernel)) {}

  const shifted::TestFunction& f() const { return f_; }
  const SmoothBump& phi() const { return phi_; }
  std::int64_t h() const { return h_; }
  const DeltaKernel& kernel() const { return kernel_; }

  /// g_q(u) = phi(u) Delta_q(u) as a jet.
  template <int N>
  Jet<N> g_jet(std::int64_t q, double u, double A_q) const {
    if (u <= phi_.alpha() || u >= phi_.beta()) return Jet<N>{};
    return phi_.jet<N>(u) * kernel_.jet<N>(q, u, A_q);
  }

  double operator()(double x, double y, std::int64_t q) const { return partial(x, y, q, 0, 0); }

  /// d^{i+j} E / dx^i dy^j for i + j <= 4.
  double partial(double x, double y, std::int64_t q, int i, int j) const {
    if (i < 0 || j < 0 || i + j > 4) throw std::invalid_argument("kernel_E: analytic path needs i + j <= 4");
    if (x <= f_.x_lo() || x >= f_.x_hi() || y <= f_.y_lo() || y >= f_.y_hi()) return 0.0;
    const double u = x - y - static_cast<double>(h_);
    const auto g = g_jet<4>(q, u, kernel_.constant_part(q));
    const auto fxj = f_.fx().jet<4>(x);
    const auto fyj = f_.fy().jet<4>(y);
    double s = 0.0;
    double ca = 1.0;
    for (int a = 0; a <= i; ++a) {
      double cb = 1.0;
      for (int b = 0; b <= j; ++b) {
        const double sgn = (b % 2 == 0) ? 1.0 : -1.0;
        s += ca * cb * fxj.derivative(i - a) * fyj.derivative(j - b) * sgn * g.derivative(a + b);
        cb = cb * (j - b) / (b + 1);
      }
      ca = ca * (i - a) / (a + 1);
    }
    return s;
  }

 private:
  shifted::TestFunction f_;
  SmoothBump phi_;
  std::int64_t h_;
  DeltaKernel kernel_;
};

inline double kernel_E(const ShiftKernelE& E, double x, double y, std::int64_t q, int i, int j) {
  return E.partial(x, y, q, i, j);
}

/// Central finite differences of E, any order.
inline double kernel_E_fd(const ShiftKernelE& E, double x, double y, std::int64_t q, int i, int j,
                          double step) {
  if (i > 0) {
    return (kernel_E_fd(E, x + step, y, q, i - 1, j, step) - kernel_E_fd(E, x - step, y, q, i - 1, j, step)) /
           (2.0 * step);
  }
  if (j > 0) {
    return (kernel_E_fd(E, x, y + step, q, 0, j - 1, step) - kernel_E_fd(E, x, y - step, q, 0, j - 1, step)) /
           (2.0 * step);
  }
  return E(x, y, q);
}

}  // namespace sconv::delta
