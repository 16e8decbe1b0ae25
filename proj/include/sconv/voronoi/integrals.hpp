// Bessel integrals against the delta-method kernel E and the hyperbola kernel K.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "sconv/common.hpp"
#include "sconv/deltamethod.hpp"
#include "sconv/shifted/hyperbola.hpp"
#include "sconv/specialfn.hpp"

namespace sconv::voronoi {

using special::QuadResult;

/// Tensor Gauss-Legendre discretisation of (x, y) -> E(x, y, q) on supp f.
/// value(a, b) = sum_ij a(x_i) b(y_j) w_i w_j E(x_i, y_j).
class KernelGrid {
 public:
  KernelGrid(const delta::ShiftKernelE& E, std::int64_t q, int panels) : q_(q), panels_(panels) {
    const auto& F = E.f();
    x_ = nodes(F.x_lo(), F.x_hi(), panels, wx_);
    y_ = nodes(F.y_lo(), F.y_hi(), panels, wy_);
    for (std::size_t i = 0; i < x_.size(); ++i) wx_[i] *= F.fx()(x_[i]);
    for (std::size_t j = 0; j < y_.size(); ++j) wy_[j] *= F.fy()(y_[j]);
    const double A = E.kernel().constant_part(q);
    const double h = static_cast<double>(E.h());
    M_.assign(x_.size() * y_.size(), 0.0);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (wx_[i] == 0.0) continue;
      for (std::size_t j = 0; j < y_.size(); ++j) {
        if (wy_[j] == 0.0) continue;
        M_[i * y_.size() + j] = wx_[i] * wy_[j] * E.g_jet<0>(q, x_[i] - y_[j] - h, A).c[0];
      }
    }
  }

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  int panels() const { return panels_; }
  std::int64_t q() const { return q_; }

  template <class FA, class FB>
  std::pair<double, double> value(FA&& a, FB&& b) const {
    std::vector<double> av(x_.size()), bv(y_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) av[i] = a(x_[i]);
    for (std::size_t j = 0; j < y_.size(); ++j) bv[j] = b(y_[j]);
    return contract(av, bv);
  }

  /// (a^T M b, |a|^T |M| |b|)
  std::pair<double, double> contract(const std::vector<double>& a, const std::vector<double>& b) const {
    KahanSum<double> s;
    double env = 0.0;
    const std::size_t ny = y_.size();
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (a[i] == 0.0) continue;
      double row = 0.0, arow = 0.0;
      const double* m = &M_[i * ny];
      for (std::size_t j = 0; j < ny; ++j) {
        row += m[j] * b[j];
        arow += std::abs(m[j] * b[j]);
      }
      s.add(a[i] * row);
      env += std::abs(a[i]) * arow;
    }
    return {s.value(), env};
  }

 private:
  static std::vector<double> nodes(double a, double b, int panels, std::vector<double>& w) {
    const auto g = special::FixedGrid::composite(a, b, panels);
    w = g.w;
    return g.x;
  }

  std::int64_t q_;
  int panels_;
  std::vector<double> x_, wx_, y_, wy_;
  std::vector<double> M_;
};

struct IntegralOptions {
  double rel_tol = 1e-7;
  int max_panels = 128;
};

namespace detail {

inline double bessel_arg(std::int64_t n, std::int64_t q, double x) {
  return 4.0 * kPi * std::sqrt(static_cast<double>(n) * x) / static_cast<double>(q);
}

inline int start_panels(const delta::ShiftKernelE& E, std::int64_t q, std::int64_t n_max) {
  const auto& F = E.f();
  const double beta = 4.0 * kPi * std::sqrt(static_cast<double>(n_max)) / static_cast<double>(q);
  const double cycles = beta * (std::sqrt(F.x_hi()) - std::sqrt(F.x_lo())) / kTwoPi;
  const double features = 4.0 * (F.x_hi() - F.x_lo()) / (static_cast<double>(q) * E.kernel().Q());
  return std::max(8, static_cast<int>(std::ceil(cycles + features)));
}

// Refine a tensor integral by panel doubling until two levels agree.
template <class Eval>
QuadResult refine(const delta::ShiftKernelE& E, std::int64_t q, int p0, const IntegralOptions& opt, Eval&& eval) {
  QuadResult out;
  if (q > E.kernel().q_max(E.f().X() + std::abs(static_cast<double>(E.h())))) return out;
  int p = std::min(p0, opt.max_panels / 2);
  auto prev = eval(KernelGrid(E, q, p));
  while (true) {
    const int p2 = 2 * p;
    KernelGrid G(E, q, p2);
    const auto cur = eval(G);
    out.value = cur.first;
    out.error = std::abs(cur.first - prev.first);
    out.nodes = static_cast<long>(G.x().size() * G.y().size());
    const double floor = 1e-13 * cur.second;
    if (out.error <= std::max(opt.rel_tol * std::abs(cur.first), floor)) {
      out.converged = true;
      return out;
    }
    if (2 * p2 > opt.max_panels) {
      out.converged = false;
      return out;
    }
    p = p2;
    prev = cur;
  }
}

}  // namespace detail

/// I(n, m, q) = 4 pi^2 iint Y0(4 pi sqrt(m x)/q) Y0(4 pi sqrt(n y)/q) E(x, y, q) dx dy.
inline QuadResult integral_I(std::int64_t n, std::int64_t m, std::int64_t q, const delta::ShiftKernelE& E,
                             const IntegralOptions& opt = {}) {
  if (n < 1 || m < 1 || q < 1) throw std::invalid_argument("integral_I: n, m, q must be positive");
  auto eval = [&](const KernelGrid& G) {
    auto r = G.value([&](double x) { return special::bessel_y0(detail::bessel_arg(m, q, x)); },
                     [&](double y) { return special::bessel_y0(detail::bessel_arg(n, q, y)); });
    return std::make_pair(4.0 * kPi * kPi * r.first, 4.0 * kPi * kPi * r.second);
  };
  return detail::refine(E, q, detail::start_panels(E, q, std::max(n, m)), opt, eval);
}

/// I(n, q) = -2 pi iint (log x + 2 gamma - 2 log q) Y0(4 pi sqrt(n y)/q) E(x, y, q) dx dy.
inline QuadResult integral_I_single(std::int64_t n, std::int64_t q, const delta::ShiftKernelE& E,
                                    const IntegralOptions& opt = {}) {
  if (n < 1 || q < 1) throw std::invalid_argument("integral_I_single: n, q must be positive");
  const double c = 2.0 * kEulerGamma - 2.0 * std::log(static_cast<double>(q));
  auto eval = [&](const KernelGrid& G) {
    auto r = G.value([&](double x) { return std::log(x) + c; },
                     [&](double y) { return special::bessel_y0(detail::bessel_arg(n, q, y)); });
    return std::make_pair(-kTwoPi * r.first, kTwoPi * r.second);
  };
  return detail::refine(E, q, detail::start_panels(E, q, n), opt, eval);
}

/// I(n, q, d) = int -2 pi Y0(4 pi sqrt(n(x - h))/q) K_{d,q}(x/a) f(x, x - h) dx, and with
/// kind K the companion int 4 K0(...) K_{d,q}(x/a) f(x, x - h) dx.
inline QuadResult integral_I_quad(std::int64_t n, std::int64_t q, std::int64_t d, const shifted::HyperbolaState& K,
                                  const shifted::TestFunction& f, std::int64_t h, std::int64_t a,
                                  special::BesselKind kind = special::BesselKind::Y, double rel_tol = 1e-9) {
  if (n < 1 || q < 1 || d < 1 || a < 1) throw std::invalid_argument("integral_I_quad: bad arguments");
  if (a % d != 0) throw std::invalid_argument("integral_I_quad: d must divide a");
  if (kind == special::BesselKind::J) throw std::invalid_argument("integral_I_quad: Y or K kernel");
  QuadResult out;
  if (static_cast<double>(q) >= K.support_bound(d)) return out;
  const double hd = static_cast<double>(h);
  const double lo = std::max(f.x_lo(), f.y_lo() + hd), hi = std::min(f.x_hi(), f.y_hi() + hd);
  if (!(hi > lo)) return out;
  const double pre = kind == special::BesselKind::Y ? -kTwoPi : 4.0;
  auto g = [&](double x) {
    const double fx = f(x, x - hd);
    if (fx == 0.0) return 0.0;
    const double k = K.K(d, q, x / static_cast<double>(a));
    if (k == 0.0) return 0.0;
    return pre * special::bessel(kind, 0, detail::bessel_arg(n, q, x - hd)) * k * fx;
  };
  // |K| <= 2 sum_{delta < 2 d sqrt Q / q} 1/delta; amplitude of the Bessel factor at the left end.
  const double k_max = 2.0 * (1.0 + std::log(std::max(1.0, K.support_bound(d) / q)));
  const double z_lo = detail::bessel_arg(n, q, lo - hd);
  const double amp = kind == special::BesselKind::Y ? std::max(1.0, std::abs(std::log(z_lo))) * std::min(1.0, std::sqrt(2.0 / (kPi * z_lo)))
                                                     : special::bessel(kind, 0, z_lo);
  special::QuadOptions o;
  o.rel_tol = rel_tol;
  o.abs_tol = std::max(1e-300, rel_tol * std::abs(pre) * (hi - lo) * k_max * amp);
  if (kind == special::BesselKind::Y) o.beta = 4.0 * kPi * std::sqrt(static_cast<double>(n)) / q;
  return special::oscillatory_integral(g, lo, hi, o);
}

}  // namespace sconv::voronoi
