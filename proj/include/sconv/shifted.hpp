// Shifted convolution sums: brute force, main terms, the quadratic-form
// pipeline through the hyperbola kernel, and error-exponent fits.
#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "sconv/arith.hpp"
#include "sconv/common.hpp"
#include "sconv/deltamethod.hpp"
#include "sconv/expsums.hpp"
#include "sconv/shifted/hyperbola.hpp"
#include "sconv/shifted/test_function.hpp"
#include "sconv/voronoi.hpp"
#include "sconv/voronoi/integrals.hpp"

namespace sconv::shifted {

using arith::DirichletCharacter;

enum class SeqKind { divisor, divisor3, tau_chi, r, cusp };

inline const char* to_string(SeqKind k) {
  switch (k) {
    case SeqKind::divisor: return "d";
    case SeqKind::divisor3: return "d3";
    case SeqKind::tau_chi: return "tau_chi";
    case SeqKind::r: return "r";
    case SeqKind::cusp: return "a";
  }
  return "?";
}

/// An arithmetic function; tau_chi needs a real character. cusp is the
/// normalized tau(n)/n^{11/2}, the only non-integer kind.
struct SequenceSpec {
  SeqKind kind = SeqKind::divisor;
  std::optional<DirichletCharacter> chi;

  SequenceSpec(SeqKind k = SeqKind::divisor, std::optional<DirichletCharacter> c = std::nullopt)
      : kind(k), chi(std::move(c)) {}

  bool integral() const { return kind != SeqKind::cusp; }

  std::vector<double> real_table(std::int64_t limit) const {
    if (kind == SeqKind::cusp) return arith::ramanujan_tau_table(std::max<std::int64_t>(limit, 1)).a;
    const auto t = table(limit);
    return std::vector<double>(t.begin(), t.end());
  }

  std::vector<std::int64_t> table(std::int64_t limit) const {
    switch (kind) {
      case SeqKind::cusp: throw std::invalid_argument("SequenceSpec: cusp coefficients are not integers");
      case SeqKind::divisor: return arith::divisor_table(limit);
      case SeqKind::divisor3: return arith::divisor_k_table(limit, 3, arith::FactorSieve(limit));
      case SeqKind::r: return arith::r_table(limit);
      case SeqKind::tau_chi: {
        if (!chi || !chi->is_real()) throw std::invalid_argument("SequenceSpec: tau_chi needs a real character");
        const auto t = arith::tau_chi_table(limit, *chi);
        std::vector<std::int64_t> out(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) out[i] = std::llround(t[i].real());
        return out;
      }
    }
    return {};
  }
};

struct ConvolutionSpec {
  SequenceSpec left, right;
  std::int64_t a = 1, b = 1, h = 1;
  TestFunction f;

  void validate() const {
    if (a < 1 || b < 1) throw std::invalid_argument("ConvolutionSpec: a, b must be positive");
    if (h == 0) throw std::invalid_argument("ConvolutionSpec: h must be nonzero");
    if (std::abs(static_cast<double>(h)) > std::pow(f.X(), 0.9))
      throw std::invalid_argument("ConvolutionSpec: |h| exceeds X^0.9");
  }
};

/// sum_{an - bm = h} L(n) R(m) f(an, bm), one loop over n.
inline double brute_shifted_sum(const ConvolutionSpec& s) {
  s.validate();
  const auto& f = s.f;
  const auto n_lo = static_cast<std::int64_t>(std::ceil(f.x_lo() / s.a));
  const auto n_hi = static_cast<std::int64_t>(std::floor(f.x_hi() / s.a));
  const auto m_hi = static_cast<std::int64_t>(std::floor(f.y_hi() / s.b));
  KahanSum<double> sum;
  auto accumulate = [&](const auto& L, const auto& R) {
    for (std::int64_t n = std::max<std::int64_t>(n_lo, 1); n <= n_hi; ++n) {
      const std::int64_t bm = s.a * n - s.h;
      if (bm <= 0 || bm % s.b) continue;
      const std::int64_t m = bm / s.b;
      if (m > m_hi) continue;
      const double w = f(static_cast<double>(s.a * n), static_cast<double>(bm));
      if (w == 0.0) continue;
      sum.add(static_cast<double>(L[n] * R[m]) * w);
    }
  };
  if (s.left.integral() && s.right.integral()) accumulate(s.left.table(n_hi + 1), s.right.table(m_hi + 1));
  else accumulate(s.left.real_table(n_hi + 1), s.right.real_table(m_hi + 1));
  return sum.value();
}

namespace detail {

using GL30 = boost::math::quadrature::gauss<double, 30>;

// Composite 30-point Gauss-Legendre on [a, b] for a vector-valued integrand.
template <std::size_t K, class F>
std::array<double, K> composite(F&& fn, double a, double b, int panels) {
  std::array<KahanSum<double>, K> acc;
  if (!(b > a)) return {};
  const auto& x = GL30::abscissa();
  const auto& w = GL30::weights();
  const double step = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * step, r = 0.5 * step;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (int s : {-1, 1}) {
        if (x[i] == 0.0 && s == 1) continue;
        const auto v = fn(c + s * r * x[i]);
        for (std::size_t k = 0; k < K; ++k) acc[k].add(r * w[i] * v[k]);
      }
    }
  }
  std::array<double, K> out{};
  for (std::size_t k = 0; k < K; ++k) out[k] = acc[k].value();
  return out;
}

}  // namespace detail

inline double diagonal_integral(const TestFunction& f, std::int64_t h, int panels = 32) {
  const double hd = static_cast<double>(h);
  const double lo = std::max(f.x_lo(), f.y_lo() + hd), hi = std::min(f.x_hi(), f.y_hi() + hd);
  return detail::composite<1>([&](double x) { return std::array<double, 1>{f(x, x - hd)}; }, lo, hi, panels)[0];
}

/// Main term for d * d with a = b = 1:
/// sum_q c_q(h)/q^2 iint (log x + 2g - 2 log q)(log y + 2g - 2 log q) E(x, y, q) dx dy
/// over every q with Delta_q not identically zero.
class BinaryDivisorMain {
 public:
  BinaryDivisorMain(const TestFunction& f, std::int64_t h, double Q, int panels = 16)
      : f_(f), h_(h), kernel_(Q), E_(f, h, kernel_), panels_(panels) {}

  /// G_k(u) = int F_k(x, x - h - u) dx with F_0 = f, F_1 = f (log x + log y), F_2 = f log x log y.
  std::array<double, 3> G(double u) const {
    const double s = static_cast<double>(h_) + u;
    const double lo = std::max(f_.x_lo(), f_.y_lo() + s), hi = std::min(f_.x_hi(), f_.y_hi() + s);
    return detail::composite<3>(
        [&](double x) {
          const double y = x - s;
          const double v = f_(x, y);
          if (v == 0.0) return std::array<double, 3>{};
          const double lx = std::log(x), ly = std::log(y);
          return std::array<double, 3>{v, v * (lx + ly), v * lx * ly};
        },
        lo, hi, panels_);
  }

  double value() const {
    const double X = f_.X();
    const double Q = kernel_.Q();
    const auto& phi = E_.phi();
    const auto Phi = detail::composite<3>(
        [&](double u) {
          auto g = G(u);
          const double p = phi(u);
          for (auto& v : g) v *= p;
          return g;
        },
        phi.alpha(), phi.beta(), 4 * panels_);
    const double u_max = X + std::abs(static_cast<double>(h_));
    const auto n_max = static_cast<std::int64_t>(std::floor(std::min(u_max, phi.beta()) / Q));
    std::vector<std::array<double, 3>> H(static_cast<std::size_t>(n_max) + 1);
    for (std::int64_t N = 1; N <= n_max; ++N) {
      const double nd = static_cast<double>(N);
      auto integrand = [&](double u) {
        const double wt = phi(u) * kernel_.weight()(u / nd);
        if (wt == 0.0) return std::array<double, 3>{};
        auto g = G(u);
        for (auto& v : g) v *= wt;
        return g;
      };
      const double lo = nd * Q, hi = std::min(2.0 * nd * Q, phi.beta());
      const auto pos = detail::composite<3>(integrand, lo, hi, 8);
      const auto neg = detail::composite<3>(integrand, -hi, -lo, 8);
      for (int k = 0; k < 3; ++k) H[N][k] = pos[k] + neg[k];
    }
    const std::int64_t q_max = kernel_.q_max(u_max);
    KahanSum<double> total;
    for (std::int64_t q = 1; q <= q_max; ++q) {
      const double cq = expsums::ramanujan_sum(h_, q);
      if (cq == 0.0) continue;
      const double A = kernel_.constant_part(q);
      std::array<double, 3> Iq{A * Phi[0], A * Phi[1], A * Phi[2]};
      for (std::int64_t r = 1; q * r <= n_max; ++r) {
        const double n = static_cast<double>(q * r);
        for (int k = 0; k < 3; ++k) Iq[k] -= H[q * r][k] / n;
      }
      const double c = 2.0 * kEulerGamma - 2.0 * std::log(static_cast<double>(q));
      const double Iqv = c * c * Iq[0] + c * Iq[1] + Iq[2];
      total.add(cq / (static_cast<double>(q) * q) * Iqv);
    }
    return total.value();
  }

  const delta::ShiftKernelE& kernel_E() const { return E_; }

 private:
  TestFunction f_;
  std::int64_t h_;
  delta::DeltaKernel kernel_;
  delta::ShiftKernelE E_;
  int panels_;
};

inline double main_term_binary_d(const ConvolutionSpec& s, double Q) {
  s.validate();
  if (s.left.kind != SeqKind::divisor || s.right.kind != SeqKind::divisor || s.a != 1 || s.b != 1)
    throw std::invalid_argument("main_term_binary_d: d * d with a = b = 1 only");
  return BinaryDivisorMain(s.f, s.h, Q).value();
}

/// |L(1, chi)|^2 int f(x, x - h) dx [sum_{q < Q, (p,q)=1} c_q(h)/q^2 + p sum_{q < Q, p | q} c_q(h)/q^2], p | h.
inline double main_term_tau_chi(const ConvolutionSpec& s, double Q, const DirichletCharacter& chi) {
  s.validate();
  const std::int64_t p = chi.modulus();
  if (s.h % p != 0) throw std::invalid_argument("main_term_tau_chi: modulus must divide h");
  const double L = std::norm(voronoi::l_function_at_one(chi));
  KahanSum<double> coprime, dividing;
  for (std::int64_t q = 1; static_cast<double>(q) < Q; ++q) {
    const double t = expsums::ramanujan_sum(s.h, q) / (static_cast<double>(q) * q);
    if (q % p == 0) dividing.add(t);
    else if (gcd(q, p) == 1) coprime.add(t);
  }
  return L * diagonal_integral(s.f, s.h) * (coprime.value() + static_cast<double>(p) * dividing.value());
}

/// r(n) = 4 tau_{chi_4}(n): 16 |L(1, chi_4)|^2 int f [sum_{q odd} + 4 sum_{4 | q}] c_q(h)/q^2, 4 | h.
inline double main_term_r(const ConvolutionSpec& s, double Q) {
  s.validate();
  if (s.h % 4 != 0) throw std::invalid_argument("main_term_r: 4 must divide h");
  return 16.0 * main_term_tau_chi(s, Q, arith::chi4());
}

// ---------------------------------------------------------------------------
// Quadratic pipeline: sum_n d(n) d(an - h) f(an, an - h).

struct QuadraticOptions {
  double eps = 0.05;
  bool dual = true;
  double tol = 1e-6;
  double quad_tol = 1e-9;
  std::int64_t n_cap = 200'000;
  int window = 20;
};

struct QuadraticReport {
  double X = 0, Q = 0;
  std::int64_t a = 1, h = 1;
  double brute = 0, main = 0, y0_line = 0, k0_line = 0;
  std::array<double, 3> ranges{};
  std::map<std::int64_t, double> by_gcd;
  std::int64_t q_terms = 0, dual_terms = 0;
  bool tallies_ok = true;
  bool support_ok = true;
  bool converged = true;

  double error() const { return brute - main; }
  double residual() const { return brute - main - y0_line - k0_line; }
};

/// sum_{sigma | a/d} mu(sigma) [sigma d | q]; equals [(a, q) = d].
inline int gcd_tally(std::int64_t a, std::int64_t d, std::int64_t q) {
  if (a % d) return 0;
  const std::int64_t ad = a / d;
  int t = 0;
  for (std::int64_t s = 1; s <= ad; ++s)
    if (ad % s == 0 && q % (s * d) == 0) t += expsums::mobius_trial(s);
  return t;
}

inline QuadraticReport quadratic_pipeline(const ConvolutionSpec& s, const QuadraticOptions& opt = {}) {
  s.validate();
  if (s.b != 1 || s.left.kind != SeqKind::divisor || s.right.kind != SeqKind::divisor)
    throw std::invalid_argument("quadratic_pipeline: d * d with b = 1 only");
  QuadraticReport rep;
  const auto& f = s.f;
  rep.X = f.X();
  rep.a = s.a;
  rep.h = s.h;
  rep.brute = brute_shifted_sum(s);
  const double a = static_cast<double>(s.a), hd = static_cast<double>(s.h);
  rep.Q = 2.0 * rep.X / a;
  const HyperbolaState K(rep.Q);
  const double lo = std::max(f.x_lo(), f.y_lo() + hd), hi = std::min(f.x_hi(), f.y_hi() + hd);
  const auto q_end = static_cast<std::int64_t>(std::ceil(K.support_bound(s.a)));

  KahanSum<double> main;
  for (std::int64_t q = 1; q <= q_end; ++q) {
    const std::int64_t r = gcd(s.a, q);
    if (static_cast<double>(q) >= K.support_bound(r)) continue;
    const double cq = expsums::ramanujan_sum(s.h, q);
    if (cq == 0.0) continue;
    const double c = 2.0 * kEulerGamma - 2.0 * std::log(static_cast<double>(q));
    auto g = [&](double x) {
      const double k = K.K(r, q, x / a);
      return k == 0.0 ? 0.0 : (std::log(x - hd) + c) * k * f(x, x - hd);
    };
    const auto I = special::oscillatory_integral(g, lo, hi, 1e-11);
    if (!I.converged) rep.converged = false;
    main.add(static_cast<double>(r) * cq / (a * q * q) * I.value);
    ++rep.q_terms;
  }
  rep.main = main.value();
  // Terms beyond the support must vanish.
  for (std::int64_t q = q_end; q <= q_end + 4; ++q) {
    const std::int64_t r = gcd(s.a, q);
    if (static_cast<double>(q) >= K.support_bound(r) && K.K(r, q, rep.X / a) != 0.0) rep.support_ok = false;
  }
  if (!opt.dual) return rep;

  const auto dt = arith::divisor_table(opt.n_cap + 1);
  const double span = std::sqrt(hi - hd) - std::sqrt(lo - hd);
  const double small_q = std::pow(rep.X, 0.5 - opt.eps);
  const double sc = std::max(1.0, std::abs(rep.main));
  KahanSum<double> y0, k0;
  std::array<KahanSum<double>, 3> ranges;
  std::map<std::int64_t, KahanSum<double>> by_gcd;
  for (std::int64_t q = 1; q <= q_end; ++q) {
    const std::int64_t r = gcd(s.a, q);
    if (static_cast<double>(q) >= K.support_bound(r)) continue;
    const auto S = expsums::kloosterman_row(s.h, q);
    const double pre = static_cast<double>(r) / (a * q * q);
    const auto n_min = static_cast<std::int64_t>(std::ceil(std::pow(5.0 * q / span, 2)));
    const double large_n = static_cast<double>(q) * q / std::pow(rep.X, 1.0 - 3.0 * opt.eps);
    KahanSum<double> line;
    std::vector<double> ring(opt.window, 0.0);
    std::int64_t n = 1;
    bool k_done = false;
    for (; n <= opt.n_cap; ++n) {
      const double dn = static_cast<double>(dt[n]);
      const double sy = S[mod(-n, q)], sk = S[mod(n, q)];
      double ty = 0.0, tk = 0.0;
      if (sy != 0.0) {
        const auto I = voronoi::integral_I_quad(n, q, r, K, f, s.h, s.a, special::BesselKind::Y, opt.quad_tol);
        if (!I.converged) rep.converged = false;
        ty = pre * dn * sy * I.value;
      }
      if (!k_done && sk != 0.0) {
        const auto I = voronoi::integral_I_quad(n, q, r, K, f, s.h, s.a, special::BesselKind::K, opt.quad_tol);
        tk = pre * dn * sk * I.value;
        if (std::abs(tk) < 1e-300) k_done = true;
      }
      y0.add(ty);
      k0.add(tk);
      const double t = ty + tk;
      line.add(t);
      const int range = static_cast<double>(q) < small_q ? 0 : (static_cast<double>(n) > large_n ? 1 : 2);
      ranges[range].add(t);
      ++rep.dual_terms;
      ring[n % opt.window] = std::abs(t);
      if (n >= n_min && n >= opt.window) {
        double w = 0.0;
        for (double v : ring) w += v;
        if (w < opt.tol * sc / 100.0 && w / opt.window * static_cast<double>(n) < opt.tol * sc) break;
      }
    }
    if (n > opt.n_cap) rep.converged = false;
    // Regroup by d = (a, q) through the Moebius tallies over sigma | a/d.
    for (std::int64_t d = 1; d <= s.a; ++d) {
      if (s.a % d) continue;
      const int t = gcd_tally(s.a, d, q);
      if (t != (d == r ? 1 : 0)) rep.tallies_ok = false;
      if (t != 0) by_gcd[d].add(t * line.value());
    }
  }
  rep.y0_line = y0.value();
  rep.k0_line = k0.value();
  for (int i = 0; i < 3; ++i) rep.ranges[i] = ranges[i].value();
  KahanSum<double> regrouped;
  for (auto& [d, v] : by_gcd) {
    rep.by_gcd[d] = v.value();
    regrouped.add(v.value());
  }
  const double plain = rep.y0_line + rep.k0_line;
  if (std::abs(regrouped.value() - plain) > 1e-12 * std::max(1.0, std::abs(plain))) rep.tallies_ok = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Exact identity: sum_{a,b} sum_{an - bm = h} d_k(n) d_l(m) f(an, bm)
//               = sum_{N - M = h} d_{k+1}(N) d_{l+1}(M) f(N, M).

struct LemConResult {
  double lhs = 0, rhs = 0;
};

template <class F>
LemConResult lem_con_check(const F& f, std::int64_t h, std::int64_t limit, int k = 2, int l = 2) {
  if (limit < 1) throw std::invalid_argument("lem_con_check: limit must be positive");
  const arith::FactorSieve sieve(limit);
  const auto dk = arith::divisor_k_table(limit, k, sieve);
  const auto dl = arith::divisor_k_table(limit, l, sieve);
  const auto dk1 = arith::divisor_k_table(limit, k + 1, sieve);
  const auto dl1 = arith::divisor_k_table(limit, l + 1, sieve);
  KahanSum<double> lhs, rhs;
  for (std::int64_t a = 1; a <= limit; ++a) {
    for (std::int64_t n = 1; a * n <= limit; ++n) {
      const std::int64_t M = a * n - h;
      if (M < 1 || M > limit) continue;
      for (std::int64_t b = 1; b <= M; ++b) {
        if (M % b) continue;
        const double w = f(a * n, M);
        if (w != 0.0) lhs.add(static_cast<double>(dk[n] * dl[M / b]) * w);
      }
    }
  }
  for (std::int64_t N = 1; N <= limit; ++N) {
    const std::int64_t M = N - h;
    if (M < 1 || M > limit) continue;
    const double w = f(N, M);
    if (w != 0.0) rhs.add(static_cast<double>(dk1[N] * dl1[M]) * w);
  }
  return {lhs.value(), rhs.value()};
}

// ---------------------------------------------------------------------------
// Reports and exponent fits.

struct ExperimentReport {
  std::string kind;
  std::string left = "d", right = "d";
  double X = 0;
  std::int64_t a = 1, b = 1, h = 1;
  double Q = 0;
  double brute = 0, main = 0, error = 0;
  double seconds = 0;
  std::optional<double> alpha;
  std::vector<std::pair<std::string, double>> extra;
};

struct ExponentFit {
  double alpha = 0, c = 0;
  double alpha_stderr = 0;
  std::vector<double> residuals;
};

inline ExponentFit fit_error_exponent(const std::vector<double>& X, const std::vector<double>& err) {
  if (X.size() != err.size()) throw std::invalid_argument("fit_error_exponent: size mismatch");
  if (X.size() < 2) throw std::invalid_argument("fit_error_exponent: need at least two points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (err[i] == 0.0) throw std::domain_error("fit_error_exponent: zero error, degenerate fit");
    lx.push_back(std::log(X[i]));
    ly.push_back(std::log(std::abs(err[i])));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::domain_error("fit_error_exponent: all X equal");
  ExponentFit out;
  out.alpha = sxy / sxx;
  const double b = my - out.alpha * mx;
  out.c = std::exp(b);
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    out.residuals.push_back(ly[i] - (out.alpha * lx[i] + b));
    ss += out.residuals.back() * out.residuals.back();
  }
  out.alpha_stderr = lx.size() > 2 ? std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
  return out;
}

inline ExponentFit fit_error_exponent(const std::vector<ExperimentReport>& reports) {
  if (reports.size() < 4) throw std::invalid_argument("fit_error_exponent: need at least four reports");
  std::vector<double> X, e;
  for (const auto& r : reports) {
    X.push_back(r.X);
    e.push_back(r.error);
  }
  return fit_error_exponent(X, e);
}

}  // namespace sconv::shifted
