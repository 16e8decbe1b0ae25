// Truncated Taylor arithmetic: Jet<N> carries f(x0), f'(x0)/1!, ..., f^{(N)}(x0)/N!.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace sconv::special {

template <int N>
struct Jet {
  std::array<double, N + 1> c{};

  static Jet constant(double v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  static Jet variable(double x0) {
    Jet j;
    j.c[0] = x0;
    if constexpr (N >= 1) j.c[1] = 1.0;
    return j;
  }

  double value() const { return c[0]; }

  /// k-th derivative.
  double derivative(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[k] * f;
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c[i] += o.c[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c[i] -= o.c[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c[0] += s;
    return *this;
  }
};

template <int N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <int N>
Jet<N> operator*(Jet<N> a, double s) { return a *= s; }
template <int N>
Jet<N> operator*(double s, Jet<N> a) { return a *= s; }
template <int N>
Jet<N> operator+(Jet<N> a, double s) { return a += s; }
template <int N>
Jet<N> operator+(double s, Jet<N> a) { return a += s; }
template <int N>
Jet<N> operator-(double s, const Jet<N>& a) {
  Jet<N> r = a * -1.0;
  r.c[0] += s;
  return r;
}
template <int N>
Jet<N> operator-(Jet<N> a, double s) {
  a.c[0] -= s;
  return a;
}

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r;
  for (int i = 0; i <= N; ++i)
    for (int j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
  return r;
}

template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
  Jet<N> r;
  r.c[0] = 1.0 / a.c[0];
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
    r.c[k] = -s * r.c[0];
  }
  return r;
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) { return a * reciprocal(b); }

template <int N>
Jet<N> exp(const Jet<N>& a) {
  Jet<N> r;
  r.c[0] = std::exp(a.c[0]);
  // r' = a' r  =>  k r_k = sum_{j=1}^k j a_j r_{k-j}
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a.c[j] * r.c[k - j];
    r.c[k] = s / k;
  }
  return r;
}

template <int N>
Jet<N> log(const Jet<N>& a) {
  Jet<N> r;
  r.c[0] = std::log(a.c[0]);
  // a r' = a'  =>  k a_0 r_k = k a_k - sum_{j=1}^{k-1} j r_j a_{k-j}
  for (int k = 1; k <= N; ++k) {
    double s = k * a.c[k];
    for (int j = 1; j < k; ++j) s -= j * r.c[j] * a.c[k - j];
    r.c[k] = s / (k * a.c[0]);
  }
  return r;
}

/// Compose a jet of an outer function (taken at g(x0)) with an inner jet g.
/// outer.c[k] are Taylor coefficients of the outer function about g.c[0].
template <int N>
Jet<N> compose(const Jet<N>& outer, const Jet<N>& inner) {
  Jet<N> dx = inner;
  dx.c[0] = 0.0;
  Jet<N> r = Jet<N>::constant(outer.c[N]);
  for (int k = N - 1; k >= 0; --k) {
    r = r * dx;
    r.c[0] += outer.c[k];
  }
  return r;
}

}  // namespace sconv::special
