// Shared constants, error types and small numeric helpers.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sconv {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kEulerGamma = std::numbers::egamma;

/// Exponent toward Ramanujan-Petersson used in averaged Kloosterman bounds.
enum class Theta { ramanujan, kim_sarnak, weil };

inline constexpr double theta_value(Theta t) {
  switch (t) {
    case Theta::ramanujan: return 0.0;
    case Theta::kim_sarnak: return 7.0 / 64.0;
    case Theta::weil: return 0.25;
  }
  return 7.0 / 64.0;
}

/// Raised when an iterative numerical procedure exhausts its budget.
/// Carries the best estimate so callers can still report it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

/// e(t) = exp(2 pi i t) for a rational phase num/den, reduced exactly first.
inline cplx e_frac(std::int64_t num, std::int64_t den) {
  std::int64_t r = num % den;
  if (r < 0) r += den;
  const double t = kTwoPi * static_cast<double>(r) / static_cast<double>(den);
  return {std::cos(t), std::sin(t)};
}

inline cplx e_real(double t) {
  const double a = kTwoPi * (t - std::floor(t));
  return {std::cos(a), std::sin(a)};
}

inline std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Inverse of a modulo m (m >= 1, gcd(a, m) = 1); 0 when m == 1.
inline std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
  if (m == 1) return 0;
  std::int64_t old_r = mod(a, m), r = m;
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t qt = old_r / r;
    std::int64_t t = old_r - qt * r;
    old_r = r;
    r = t;
    t = old_s - qt * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1) throw std::invalid_argument("mod_inverse: not invertible");
  return mod(old_s, m);
}

/// Neumaier-compensated accumulator; order of add() calls fixes the result.
template <class T = double>
class KahanSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{};
  T comp_{};
};

template <>
class KahanSum<cplx> {
 public:
  void add(cplx x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum<double> re_;
  KahanSum<double> im_;
};

}  // namespace sconv
