// Adaptive Gauss-Kronrod integration with per-oscillation pre-splitting, and
// fixed composite Gauss-Legendre grids for batched transforms.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sconv/common.hpp"

namespace sconv::special {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  long nodes = 0;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  /// Phase of the oscillating factor is beta * sqrt(x); 0 for none.
  double beta = 0.0;
  long node_budget = 4'000'000;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

inline Panel gk21(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
  return {a, b, v, err};
}

// Breakpoints no farther apart than a quarter wavelength of sin(beta sqrt x).
inline std::vector<double> oscillation_breaks(double a, double b, double beta) {
  std::vector<double> x{a};
  if (beta > 0.0) {
    double t = a;
    while (true) {
      // local wavelength 2 pi / (beta / (2 sqrt t)); a quarter of it
      const double step = kPi * std::sqrt(std::max(t, 1e-300)) / beta;
      const double h = std::max(step, (b - a) * 1e-7);
      t += h;
      if (t >= b) break;
      x.push_back(t);
    }
  }
  x.push_back(b);
  return x;
}

}  // namespace detail

/// Integral of f over [a, b]; never throws on non-convergence, the flag is set
/// and the best estimate returned.
inline QuadResult oscillatory_integral(const std::function<double(double)>& f, double a, double b,
                                       const QuadOptions& opt = {}) {
  if (opt.rel_tol < 1e-12) throw std::invalid_argument("oscillatory_integral: rel_tol below 1e-12");
  QuadResult out;
  if (b == a) return out;
  const double sign = b < a ? -1.0 : 1.0;
  if (b < a) std::swap(a, b);
  const auto breaks = detail::oscillation_breaks(a, b, opt.beta);
  std::priority_queue<detail::Panel> heap;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const auto p = detail::gk21(f, breaks[i], breaks[i + 1]);
    out.nodes += 21;
    err += p.error;
    heap.push(p);
  }
  std::vector<detail::Panel> done;
  auto current_value = [&]() {
    KahanSum<double> s;
    std::vector<detail::Panel> all = done;
    auto copy = heap;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
    for (const auto& p : all) s.add(p.value);
    return s.value();
  };
  double value = current_value();
  while (err > std::max(opt.rel_tol * std::abs(value), opt.abs_tol)) {
    if (out.nodes + 42 > opt.node_budget) {
      out.converged = false;
      break;
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      done.push_back(worst);
      if (heap.empty()) break;
      continue;
    }
    const auto l = detail::gk21(f, worst.a, mid);
    const auto r = detail::gk21(f, mid, worst.b);
    out.nodes += 42;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    value += l.value + r.value - worst.value;
  }
  value = current_value();
  err = 0.0;
  for (const auto& p : done) err += p.error;
  while (!heap.empty()) {
    err += heap.top().error;
    heap.pop();
  }
  out.value = sign * value;
  out.error = err;
  if (err > std::max(opt.rel_tol * std::abs(value), opt.abs_tol)) out.converged = false;
  return out;
}

inline QuadResult oscillatory_integral(const std::function<double(double)>& f, double a, double b,
                                       double rel_tol, double beta = 0.0) {
  QuadOptions o;
  o.rel_tol = rel_tol;
  o.beta = beta;
  return oscillatory_integral(f, a, b, o);
}

/// Composite Gauss-Legendre rule: 20 nodes on each of `panels` equal panels.
struct FixedGrid {
  std::vector<double> x;
  std::vector<double> w;

  static FixedGrid composite(double a, double b, int panels) {
    using G = boost::math::quadrature::gauss<double, 20>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    FixedGrid g;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = a + (p + 0.5) * h;
      for (std::size_t i = 0; i < ab.size(); ++i) {
        g.x.push_back(c - 0.5 * h * ab[i]);
        g.w.push_back(0.5 * h * wt[i]);
        g.x.push_back(c + 0.5 * h * ab[i]);
        g.w.push_back(0.5 * h * wt[i]);
      }
    }
    return g;
  }

  /// Panels sized to resolve sin(beta sqrt x) with a few nodes per wavelength.
  static FixedGrid for_phase(double a, double b, double beta, int min_panels = 4) {
    const double cycles = beta * (std::sqrt(b) - std::sqrt(a)) / kTwoPi;
    const int panels = std::max(min_panels, static_cast<int>(std::ceil(cycles / 2.0)) + min_panels);
    return composite(a, b, panels);
  }

  std::size_t size() const { return x.size(); }
};

}  // namespace sconv::special
