// Product test functions f(x, y) = u(x) v(y) from two smooth bumps.
#pragma once

#include <array>
#include <cmath>
#include <string>

#include "sconv/specialfn/bump.hpp"

namespace sconv::shifted {

using special::SmoothBump;

class TestFunction {
 public:
  TestFunction(SmoothBump fx, SmoothBump fy, double X) : fx_(std::move(fx)), fy_(std::move(fy)), X_(X) {}

  /// f supported on [X, 2X]^2; "plateau" is 1 on [1.25X, 1.75X], "standard"
  /// is the plain bump in both variables.
  static TestFunction dyadic(double X, const std::string& profile = "plateau") {
    return TestFunction(make(X, profile), make(X, profile), X);
  }

  /// A deliberately non-symmetric f on [X, 2X]^2.
  static TestFunction dyadic_skew(double X) {
    return TestFunction(SmoothBump::plateau(X, 1.2 * X, 1.6 * X, 2 * X), SmoothBump::standard(X, 2 * X), X);
  }

  double X() const { return X_; }
  const SmoothBump& fx() const { return fx_; }
  const SmoothBump& fy() const { return fy_; }
  double x_lo() const { return fx_.alpha(); }
  double x_hi() const { return fx_.beta(); }
  double y_lo() const { return fy_.alpha(); }
  double y_hi() const { return fy_.beta(); }

  double operator()(double x, double y) const {
    const double a = fx_(x);
    return a == 0.0 ? 0.0 : a * fy_(y);
  }

  /// d^{i+j} f / dx^i dy^j.
  double partial(double x, double y, int i, int j) const { return fx_.derivative(x, i) * fy_.derivative(y, j); }

  /// C_ij with |d^{i+j} f| <= C_ij / X^{i+j}.
  double certificate(int i, int j) const {
    return fx_.max_derivative(i) * fy_.max_derivative(j) * std::pow(X_, i + j);
  }

 private:
  static SmoothBump make(double X, const std::string& profile) {
    if (profile == "standard") return SmoothBump::standard(X, 2 * X);
    if (profile == "plateau") return SmoothBump::plateau(X, 1.25 * X, 1.75 * X, 2 * X);
    throw std::invalid_argument("TestFunction: unknown profile " + profile);
  }

  SmoothBump fx_, fy_;
  double X_;
};

}  // namespace sconv::shifted
