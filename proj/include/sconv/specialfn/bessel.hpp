// Bessel functions J_n, Y_n, K_n of integer order for real argument.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sconv/common.hpp"

namespace sconv::special {

enum class BesselKind { J, Y, K };

inline const char* to_string(BesselKind k) {
  switch (k) {
    case BesselKind::J: return "J";
    case BesselKind::Y: return "Y";
    case BesselKind::K: return "K";
  }
  return "?";
}

namespace detail {

using ld = long double;
inline constexpr ld kPiL = 3.141592653589793238462643383279502884L;
inline constexpr ld kGammaL = 0.577215664901532860606512090082402431L;

inline ld factorial_l(int n) {
  ld f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// digamma(k + 1) = H_k - gamma.
inline ld psi_int(int k) {
  ld h = 0.0L;
  for (int i = 1; i <= k; ++i) h += 1.0L / i;
  return h - kGammaL;
}

inline ld series_j(int n, ld z) {
  const ld x = z * z / 4.0L;
  ld term = std::pow(z / 2.0L, static_cast<ld>(n)) / factorial_l(n);
  ld s = term;
  for (int k = 1; k < 500; ++k) {
    term *= -x / (static_cast<ld>(k) * (k + n));
    s += term;
    if (std::fabs(term) < 1e-22L * std::fabs(s) && static_cast<ld>(k) > x / 2) break;
  }
  return s;
}

inline ld series_i(int n, ld z) {
  const ld x = z * z / 4.0L;
  ld term = std::pow(z / 2.0L, static_cast<ld>(n)) / factorial_l(n);
  ld s = term;
  for (int k = 1; k < 500; ++k) {
    term *= x / (static_cast<ld>(k) * (k + n));
    s += term;
    if (term < 1e-22L * s) break;
  }
  return s;
}

inline ld series_y(int n, ld z) {
  const ld half = z / 2.0L;
  const ld x = half * half;
  ld head = 0.0L;
  for (int k = 0; k < n; ++k)
    head += factorial_l(n - k - 1) / factorial_l(k) * std::pow(x, static_cast<ld>(k));
  head *= std::pow(half, static_cast<ld>(-n)) / kPiL;
  ld term = 1.0L / factorial_l(n);
  ld tail = (psi_int(0) + psi_int(n)) * term;
  for (int k = 1; k < 500; ++k) {
    term *= -x / (static_cast<ld>(k) * (k + n));
    const ld t = (psi_int(k) + psi_int(n + k)) * term;
    tail += t;
    if (std::fabs(t) < 1e-22L * std::fabs(tail) && static_cast<ld>(k) > x / 2) break;
  }
  tail *= std::pow(half, static_cast<ld>(n)) / kPiL;
  return -head + 2.0L / kPiL * std::log(half) * series_j(n, z) - tail;
}

inline ld series_k(int n, ld z) {
  const ld half = z / 2.0L;
  const ld x = half * half;
  ld head = 0.0L;
  for (int k = 0; k < n; ++k)
    head += factorial_l(n - k - 1) / factorial_l(k) * std::pow(-x, static_cast<ld>(k));
  head *= 0.5L * std::pow(half, static_cast<ld>(-n));
  ld term = 1.0L / factorial_l(n);
  ld tail = (psi_int(0) + psi_int(n)) * term;
  for (int k = 1; k < 500; ++k) {
    term *= x / (static_cast<ld>(k) * (k + n));
    const ld t = (psi_int(k) + psi_int(n + k)) * term;
    tail += t;
    if (std::fabs(t) < 1e-22L * std::fabs(tail)) break;
  }
  tail *= 0.5L * std::pow(half, static_cast<ld>(n));
  const ld sgn = (n % 2 == 0) ? 1.0L : -1.0L;
  return head - sgn * std::log(half) * series_i(n, z) + sgn * tail;
}

// Hankel P, Q for order n; truncated at the smallest term.
inline void hankel_pq(int n, double z, double& P, double& Q) {
  const double mu = 4.0 * n * n;
  P = 1.0;
  Q = 0.0;
  double a = 1.0;
  double prev = 1e300;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (k * 8.0 * z);
    const double mag = std::fabs(a);
    if (mag > prev) break;
    prev = mag;
    const int r = k % 4;
    if (r == 1) Q += a;
    else if (r == 2) P -= a;
    else if (r == 3) Q -= a;
    else P += a;
    if (mag < 1e-18) break;
  }
}

// K_0, K_1 for z > 2 by Steed's continued fraction.
inline void k01_cf(double x, double& k0, double& k1) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < 1e-17) break;
  }
  h = a1 * h;
  k0 = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

}  // namespace detail

/// Evaluator for one kind and order; z0 switches the trigonometric kinds from
/// series to the Hankel expansion.
struct BesselEvaluator {
  BesselKind kind = BesselKind::J;
  int order = 0;
  double z0 = 12.0;

  double series(double z) const;
  double asymptotic(double z) const;
  double operator()(double z) const;
  /// i-th derivative, i <= 8.
  double derivative(double z, int i) const;
};

inline double bessel_series(BesselKind kind, int n, double z) {
  if (n < 0) throw std::invalid_argument("bessel: negative order");
  switch (kind) {
    case BesselKind::J: return static_cast<double>(detail::series_j(n, z));
    case BesselKind::Y: return static_cast<double>(detail::series_y(n, z));
    case BesselKind::K: return static_cast<double>(detail::series_k(n, z));
  }
  return 0.0;
}

/// Hankel expansion; J and Y only.
inline double bessel_asymptotic(BesselKind kind, int n, double z) {
  if (kind == BesselKind::K) throw std::invalid_argument("bessel_asymptotic: J or Y only");
  double P, Q;
  detail::hankel_pq(n, z, P, Q);
  // chi = z - (n/2 + 1/4) pi; reduce the n-dependent shift exactly.
  const double c = std::cos(z), s = std::sin(z);
  const double r = std::numbers::sqrt2 / 2.0;
  double cc = r * (c + s), ss = r * (s - c);  // cos, sin of z - pi/4
  for (int k = 0; k < n % 4; ++k) {
    const double t = cc;
    cc = ss;
    ss = -t;
  }
  const double amp = std::sqrt(2.0 / (kPi * z));
  return kind == BesselKind::J ? amp * (P * cc - Q * ss) : amp * (P * ss + Q * cc);
}

namespace detail {

inline void k_01(double z, double& k0, double& k1) {
  if (z <= 2.0) {
    k0 = static_cast<double>(series_k(0, z));
    k1 = static_cast<double>(series_k(1, z));
  } else {
    k01_cf(z, k0, k1);
  }
}

}  // namespace detail

inline double bessel(BesselKind kind, int n, double z, double z0 = 12.0) {
  if (n < 0) throw std::invalid_argument("bessel: negative order");
  if (std::isnan(z)) throw std::domain_error("bessel: NaN argument");
  if (kind == BesselKind::J) {
    if (z < 0.0) throw std::domain_error("bessel: J needs z >= 0");
    if (z == 0.0) return n == 0 ? 1.0 : 0.0;
    if (z <= z0 || n >= z) return bessel_series(kind, n, z);
    if (n <= 1) return bessel_asymptotic(kind, n, z);
    double a = bessel_asymptotic(kind, 0, z), b = bessel_asymptotic(kind, 1, z);
    for (int k = 1; k < n; ++k) {
      const double c = 2.0 * k / z * b - a;
      a = b;
      b = c;
    }
    return b;
  }
  if (!(z > 0.0)) throw std::domain_error(std::string("bessel: ") + to_string(kind) + " needs z > 0");
  double a, b;
  if (kind == BesselKind::Y) {
    if (z <= z0) {
      if (n <= 1 || z < 2.0) return bessel_series(kind, n, z);
      a = bessel_series(kind, 0, z);
      b = bessel_series(kind, 1, z);
    } else {
      a = bessel_asymptotic(kind, 0, z);
      b = bessel_asymptotic(kind, 1, z);
    }
    if (n == 0) return a;
    for (int k = 1; k < n; ++k) {
      const double c = 2.0 * k / z * b - a;
      a = b;
      b = c;
    }
    return b;
  }
  detail::k_01(z, a, b);
  if (n == 0) return a;
  for (int k = 1; k < n; ++k) {
    const double c = 2.0 * k / z * b + a;
    a = b;
    b = c;
  }
  return b;
}

/// i-th derivative in z from the half-sum identities
/// f^{(i)}_n = 2^{-i} sum_k (-1)^k C(i,k) f_{n-i+2k} (J, Y) and
/// K^{(i)}_n = (-1/2)^i sum_k C(i,k) K_{n-i+2k}.
inline double bessel_derivative(BesselKind kind, int n, double z, int i, double z0 = 12.0) {
  if (i < 0 || i > 8) throw std::invalid_argument("bessel_derivative: order 0..8");
  if (i == 0) return bessel(kind, n, z, z0);
  double s = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= i; ++k) {
    const int m = n - i + 2 * k;
    double f;
    if (m >= 0) {
      f = bessel(kind, m, z, z0);
    } else {
      f = bessel(kind, -m, z, z0);
      if (kind != BesselKind::K && (-m) % 2 == 1) f = -f;
    }
    const double sgn = (kind != BesselKind::K && k % 2 == 1) ? -1.0 : 1.0;
    s += sgn * binom * f;
    binom = binom * (i - k) / (k + 1);
  }
  const double scale = (kind == BesselKind::K) ? std::pow(-0.5, i) : std::pow(0.5, i);
  return scale * s;
}

inline double BesselEvaluator::series(double z) const { return bessel_series(kind, order, z); }
inline double BesselEvaluator::asymptotic(double z) const { return bessel_asymptotic(kind, order, z); }
inline double BesselEvaluator::operator()(double z) const { return bessel(kind, order, z, z0); }
inline double BesselEvaluator::derivative(double z, int i) const {
  return bessel_derivative(kind, order, z, i, z0);
}

inline double bessel_j0(double z) { return bessel(BesselKind::J, 0, z); }
inline double bessel_y0(double z) { return bessel(BesselKind::Y, 0, z); }
inline double bessel_k0(double z) { return bessel(BesselKind::K, 0, z); }

}  // namespace sconv::special
