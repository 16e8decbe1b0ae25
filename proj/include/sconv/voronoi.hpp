// Two-sided Voronoi summation: direct sums sum_n a(n) e(nd/q) g(n) against
// main term plus Bessel-transformed dual sums, for five coefficient families.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "sconv/arith.hpp"
#include "sconv/common.hpp"
#include "sconv/expsums.hpp"
#include "sconv/specialfn.hpp"

namespace sconv::voronoi {

using arith::DirichletCharacter;
using special::BesselKind;
using special::SmoothBump;

/// L(1, chi) = -(1/c) sum_{a=1}^{c} chi(a) digamma(a/c), chi non-principal.
inline cplx l_function_at_one(const DirichletCharacter& chi) {
  if (chi.is_principal()) throw std::invalid_argument("l_function_at_one: principal character");
  const std::int64_t c = chi.modulus();
  KahanSum<cplx> s;
  for (std::int64_t a = 1; a <= c; ++a) {
    const cplx v = chi(a);
    if (v != 0.0) s.add(v * boost::math::digamma(static_cast<double>(a) / static_cast<double>(c)));
  }
  return -s.value() / static_cast<double>(c);
}

enum class Sequence { divisor, tau_chi_coprime, tau_chi_dividing, r_half, cusp };

inline const char* to_string(Sequence s) {
  switch (s) {
    case Sequence::divisor: return "d";
    case Sequence::tau_chi_coprime: return "tau_chi_coprime";
    case Sequence::tau_chi_dividing: return "tau_chi_dividing";
    case Sequence::r_half: return "r_half";
    case Sequence::cusp: return "cusp";
  }
  return "?";
}

struct VoronoiCase {
  Sequence seq = Sequence::divisor;
  std::optional<DirichletCharacter> chi;
  int weight = 12;
  std::int64_t q = 1;
  std::int64_t d = 1;

  void validate() const {
    if (q < 1) throw std::invalid_argument("VoronoiCase: q must be >= 1");
    if (gcd(d, q) != 1) throw std::invalid_argument("VoronoiCase: gcd(d, q) must be 1");
    switch (seq) {
      case Sequence::tau_chi_coprime:
      case Sequence::tau_chi_dividing: {
        if (!chi || !chi->primitive() || chi->is_principal())
          throw std::invalid_argument("VoronoiCase: tau_chi needs a primitive non-principal character");
        if (chi->parity() != arith::Parity::odd)
          throw std::invalid_argument("VoronoiCase: tau_chi kernel implemented for odd characters");
        const std::int64_t c = chi->modulus();
        if (seq == Sequence::tau_chi_coprime && gcd(c, q) != 1)
          throw std::invalid_argument("VoronoiCase: coprime case needs gcd(c, q) = 1");
        if (seq == Sequence::tau_chi_dividing && q % c != 0)
          throw std::invalid_argument("VoronoiCase: dividing case needs c | q");
        break;
      }
      case Sequence::r_half:
        if (q % 4 != 2) throw std::invalid_argument("VoronoiCase: r case needs q = 2 mod 4");
        break;
      case Sequence::cusp:
        if (weight != 12) throw std::invalid_argument("VoronoiCase: only the weight 12 level 1 form is tabulated");
        break;
      case Sequence::divisor: break;
    }
  }

  std::string label() const {
    std::string s = to_string(seq);
    if (chi) s += "_mod" + std::to_string(chi->modulus());
    return s;
  }
};

struct DualTerm {
  std::int64_t n;
  cplx coefficient;  // everything except the transformed weight
  double transform;
};

struct DualExpansion {
  cplx main_term{};
  cplx dual_sum{};
  std::vector<DualTerm> dual_terms;
  std::int64_t n_star = 0;
  double tail_bound = 0.0;
  bool converged = true;

  cplx value() const { return main_term + dual_sum; }
};

class DualSumError : public ConvergenceError {
 public:
  DualSumError(const std::string& what, DualExpansion partial)
      : ConvergenceError(what, std::abs(partial.value()), partial.tail_bound), partial_(std::move(partial)) {}
  const DualExpansion& partial() const { return partial_; }

 private:
  DualExpansion partial_;
};

/// T(beta) = int g(x) B(beta sqrt x) dx.  Direct values come from composite
/// Gauss-Legendre in s = sqrt x; for beta above `direct_below` they are read
/// off piecewise Chebyshev interpolants built lazily on panels of fixed width.
class BesselTransform {
 public:
  static constexpr int kDegree = 25;

  BesselTransform(const SmoothBump& g, BesselKind kind, int order, double panel_width = 0.25,
                  double direct_below = 1.0)
      : g_(g), kind_(kind), order_(order), width_(panel_width), direct_below_(direct_below) {}

  double direct(double beta) {
    const double lo = std::sqrt(g_.alpha()), hi = std::sqrt(g_.beta());
    if (kind_ == BesselKind::K && beta * lo > 740.0) return 0.0;
    const double cycles = beta * (hi - lo) / kTwoPi;
    int panels = 32;
    while (panels < 32 + cycles / 1.5) panels *= 2;
    const Level& L = level(panels);
    KahanSum<double> s;
    for (std::size_t i = 0; i < L.w.size(); ++i) s.add(L.w[i] * special::bessel(kind_, order_, beta * L.s[i]));
    return s.value();
  }

  double operator()(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("BesselTransform: beta must be positive");
    if (beta < direct_below_) return direct(beta);
    if (kind_ == BesselKind::K && beta * std::sqrt(g_.alpha()) > 740.0) return 0.0;
    const auto k = static_cast<std::size_t>(beta / width_);
    if (k >= panels_.size()) panels_.resize(k + 1);
    auto& c = panels_[k];
    if (c.empty()) c = build(k);
    const double a = k * width_, b = a + width_;
    const double t = (2.0 * beta - a - b) / (b - a);
    // Clenshaw
    double b1 = 0.0, b2 = 0.0;
    for (int j = kDegree - 1; j >= 1; --j) {
      const double tmp = 2.0 * t * b1 - b2 + c[j];
      b2 = b1;
      b1 = tmp;
    }
    return t * b1 - b2 + c[0];
  }

  std::size_t panels_built() const {
    std::size_t n = 0;
    for (const auto& p : panels_) n += !p.empty();
    return n;
  }

 private:
  struct Level {
    std::vector<double> s;
    std::vector<double> w;
  };

  const Level& level(int panels) {
    auto it = levels_.find(panels);
    if (it != levels_.end()) return it->second;
    const double lo = std::sqrt(g_.alpha()), hi = std::sqrt(g_.beta());
    const auto grid = special::FixedGrid::composite(lo, hi, panels);
    Level L;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x[i];
      const double gv = g_(x * x);
      if (gv == 0.0) continue;
      L.s.push_back(x);
      L.w.push_back(grid.w[i] * gv * 2.0 * x);
    }
    return levels_.emplace(panels, std::move(L)).first->second;
  }

  std::vector<double> build(std::size_t k) {
    const double a = k * width_, b = a + width_;
    std::array<double, kDegree> f{};
    for (int j = 0; j < kDegree; ++j) {
      const double t = std::cos(kPi * (j + 0.5) / kDegree);
      f[j] = direct(0.5 * (a + b) + 0.5 * (b - a) * t);
    }
    std::vector<double> c(kDegree, 0.0);
    for (int m = 0; m < kDegree; ++m) {
      double s = 0.0;
      for (int j = 0; j < kDegree; ++j) s += f[j] * std::cos(kPi * m * (j + 0.5) / kDegree);
      c[m] = (m == 0 ? 1.0 : 2.0) * s / kDegree;
    }
    return c;
  }

  SmoothBump g_;
  BesselKind kind_;
  int order_;
  double width_;
  double direct_below_;
  std::vector<std::vector<double>> panels_;
  std::map<int, Level> levels_;
};

struct RhsOptions {
  double tol = 1e-9;
  std::int64_t max_terms = 1'000'000;
  int window = 20;
  bool keep_terms = false;
};

/// Holds coefficient tables and per-(kernel, q) transforms so that many
/// (case, q, d) evaluations with one weight g share work.
class VoronoiVerifier {
 public:
  explicit VoronoiVerifier(SmoothBump g) : g_(std::move(g)) {
    if (!(g_.alpha() > 0.0)) throw std::invalid_argument("VoronoiVerifier: g must be supported in (0, inf)");
    special::QuadOptions o;
    o.rel_tol = 1e-12;
    int_g_ = special::oscillatory_integral([this](double x) { return g_(x); }, g_.alpha(), g_.beta(), o).value;
    int_g_log_ = special::oscillatory_integral([this](double x) { return g_(x) * std::log(x); }, g_.alpha(),
                                               g_.beta(), o)
                     .value;
  }

  const SmoothBump& weight() const { return g_; }

  cplx lhs(const VoronoiCase& vc) {
    vc.validate();
    const auto n_lo = static_cast<std::int64_t>(std::floor(g_.alpha())) + 1;
    const auto n_hi = static_cast<std::int64_t>(std::ceil(g_.beta())) - 1;
    const CoefView a = view(vc, false, n_hi + 1);
    KahanSum<cplx> s;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
      const double gv = g_(static_cast<double>(n));
      if (gv == 0.0) continue;
      s.add(a(n) * e_frac(mod(n, vc.q) * mod(vc.d, vc.q), vc.q) * gv);
    }
    return s.value();
  }

  cplx main_term(const VoronoiCase& vc) const {
    const double q = static_cast<double>(vc.q);
    switch (vc.seq) {
      case Sequence::divisor:
        return (int_g_log_ + (2.0 * kEulerGamma - 2.0 * std::log(q)) * int_g_) / q;
      case Sequence::tau_chi_coprime: return (*vc.chi)(vc.q) * l_function_at_one(*vc.chi) / q * int_g_;
      case Sequence::tau_chi_dividing: {
        const auto db = mod_inverse(vc.d, vc.q);
        return (*vc.chi)(db) * expsums::gauss_sum(*vc.chi) * std::conj(l_function_at_one(*vc.chi)) / q * int_g_;
      }
      case Sequence::r_half:
      case Sequence::cusp: return 0.0;
    }
    return 0.0;
  }

  DualExpansion rhs(const VoronoiCase& vc, const RhsOptions& opt = {}) {
    vc.validate();
    DualExpansion out;
    out.main_term = main_term(vc);
    const double q = static_cast<double>(vc.q);
    const std::int64_t qi = vc.q;

    // Per-case kernels, coefficient prefactor and dual residue.
    cplx pre{};
    std::int64_t dual_mod = qi, dual_res = 0;
    double scale = q;
    int step = 1;
    BesselKind kind = BesselKind::J;
    int order = 0;
    switch (vc.seq) {
      case Sequence::divisor:
        kind = BesselKind::Y;
        dual_res = mod_inverse(vc.d, qi);
        break;
      case Sequence::tau_chi_coprime: {
        const std::int64_t c = vc.chi->modulus();
        scale = q * std::sqrt(static_cast<double>(c));
        pre = cplx(0.0, -kTwoPi) * (*vc.chi)(qi) * expsums::gauss_sum(*vc.chi) / (static_cast<double>(c) * q);
        dual_res = mod_inverse(mod(vc.d * c, qi), qi);
        break;
      }
      case Sequence::tau_chi_dividing: {
        const auto db = mod_inverse(vc.d, qi);
        pre = cplx(0.0, kTwoPi) * (*vc.chi)(db) / q;
        dual_res = db;
        break;
      }
      case Sequence::r_half:
        scale = q * std::sqrt(2.0);
        pre = cplx(0.0, 4.0 * kPi) * static_cast<double>(arith::chi4_value(vc.d)) / q;
        dual_mod = 2 * qi;
        dual_res = mod_inverse(vc.d, 2 * qi);
        step = 2;
        break;
      case Sequence::cusp: {
        order = vc.weight - 1;
        const int ik = vc.weight % 4;
        const cplx ipow = ik == 0 ? cplx(1, 0) : ik == 1 ? cplx(0, 1) : ik == 2 ? cplx(-1, 0) : cplx(0, -1);
        pre = kTwoPi * ipow / q;
        dual_res = mod_inverse(vc.d, qi);
        break;
      }
    }
    BesselTransform& T = transform(kind, order);
    BesselTransform* TK = vc.seq == Sequence::divisor ? &transform(BesselKind::K, 0) : nullptr;
    auto beta = [&](std::int64_t m) { return 4.0 * kPi * std::sqrt(static_cast<double>(m)) / scale; };

    const double span = std::sqrt(g_.beta()) - std::sqrt(g_.alpha());
    const auto n_min = static_cast<std::int64_t>(std::ceil(std::pow(5.0 * scale / span, 2)));
    std::vector<double> ring(opt.window, 0.0);
    int filled = 0;
    KahanSum<cplx> total;
    CoefView a = view(vc, true, 4096);
    std::int64_t n = 1;
    std::int64_t count = 0;
    for (; n <= opt.max_terms; n += step) {
      if (n >= a.size()) a = view(vc, true, 2 * n);
      cplx term{};
      const cplx coef = a(n);
      if (std::abs(coef) >= 1e-12) {
        if (vc.seq == Sequence::divisor) {
          const cplx cy = coef * e_frac(-mod(n, qi) * dual_res, qi) * (-kTwoPi / q);
          const cplx ck = coef * e_frac(mod(n, qi) * dual_res, qi) * (4.0 / q);
          const double ty = T(beta(n)), tk = (*TK)(beta(n));
          term = cy * ty + ck * tk;
          if (opt.keep_terms) {
            out.dual_terms.push_back({n, cy, ty});
            out.dual_terms.push_back({n, ck, tk});
          }
        } else {
          const cplx cc = pre * coef * e_frac(-mod(n, dual_mod) * dual_res, dual_mod);
          const double t = T(beta(n));
          term = cc * t;
          if (opt.keep_terms) out.dual_terms.push_back({n, cc, t});
        }
      }
      if (std::abs(coef) < 1e-12) continue;
      total.add(term);
      ring[count % opt.window] = std::abs(term);
      ++count;
      filled = std::min(filled + 1, opt.window);
      if (n >= n_min && filled == opt.window) {
        double s = 0.0;
        for (double v : ring) s += v;
        const double sc = std::max(1.0, std::abs(out.main_term + total.value()));
        const double tail = s / opt.window * static_cast<double>(n) / step;
        if (s < opt.tol * sc / 100.0 && tail < opt.tol * sc) {
          out.tail_bound = tail;
          break;
        }
      }
    }
    out.n_star = std::min(n, opt.max_terms);
    out.dual_sum = total.value();
    if (n > opt.max_terms) {
      out.converged = false;
      double s = 0.0;
      for (double v : ring) s += v;
      out.tail_bound = s / opt.window * static_cast<double>(opt.max_terms) / step;
    }
    return out;
  }

 private:
  struct ChiKey {
    std::int64_t modulus;
    std::vector<std::pair<double, double>> values;
    bool operator<(const ChiKey& o) const { return std::tie(modulus, values) < std::tie(o.modulus, o.values); }
  };

  static ChiKey key(const DirichletCharacter& chi) {
    ChiKey k{chi.modulus(), {}};
    for (const auto& v : chi.values()) k.values.emplace_back(v.real(), v.imag());
    return k;
  }

  static std::int64_t grow(std::int64_t have, std::int64_t need) {
    std::int64_t n = std::max<std::int64_t>(have, 4096);
    while (n < need) n *= 2;
    return n;
  }

  void ensure(const VoronoiCase& vc, std::int64_t n) {
    switch (vc.seq) {
      case Sequence::divisor:
        if (static_cast<std::int64_t>(d_.size()) <= n) d_ = arith::divisor_table(grow(d_.size(), n + 1));
        break;
      case Sequence::tau_chi_coprime:
      case Sequence::tau_chi_dividing: {
        for (const auto& chi : {*vc.chi, vc.chi->conj()}) {
          auto& t = tau_[key(chi)];
          if (static_cast<std::int64_t>(t.size()) <= n) t = arith::tau_chi_table(grow(t.size(), n + 1), chi);
        }
        break;
      }
      case Sequence::r_half:
        if (static_cast<std::int64_t>(r_.size()) <= n) r_ = arith::r_table(grow(r_.size(), n + 1));
        break;
      case Sequence::cusp:
        if (!cusp_ || cusp_->limit() < n) {
          const std::int64_t have = cusp_ ? cusp_->limit() : 0;
          cusp_ = std::make_unique<arith::CuspFormCoeffs>(arith::ramanujan_tau_table(grow(have, n + 1)));
        }
        break;
    }
  }

  /// Read-only window onto one coefficient table.
  struct CoefView {
    const std::vector<std::int64_t>* ints = nullptr;
    const std::vector<cplx>* cplxs = nullptr;
    const std::vector<double>* reals = nullptr;
    double factor = 1.0;
    bool odd_only = false;

    std::int64_t size() const {
      if (ints) return static_cast<std::int64_t>(ints->size());
      if (cplxs) return static_cast<std::int64_t>(cplxs->size());
      return static_cast<std::int64_t>(reals->size());
    }
    cplx operator()(std::int64_t n) const {
      if (odd_only && (n & 1) == 0) return 0.0;
      if (ints) return factor * static_cast<double>((*ints)[n]);
      if (cplxs) return (*cplxs)[n];
      return (*reals)[n];
    }
  };

  CoefView view(const VoronoiCase& vc, bool dual, std::int64_t need) {
    ensure(vc, need);
    CoefView v;
    switch (vc.seq) {
      case Sequence::divisor: v.ints = &d_; break;
      case Sequence::tau_chi_coprime:
        v.cplxs = dual ? &tau_[key(vc.chi->conj())] : &tau_[key(*vc.chi)];
        break;
      case Sequence::tau_chi_dividing: v.cplxs = &tau_[key(*vc.chi)]; break;
      case Sequence::r_half:
        v.ints = &r_;
        if (dual) {
          v.factor = 0.5;
          v.odd_only = true;
        }
        break;
      case Sequence::cusp: v.reals = &cusp_->a; break;
    }
    return v;
  }

  BesselTransform& transform(BesselKind kind, int order) {
    const auto k = std::make_pair(static_cast<int>(kind), order);
    auto it = transforms_.find(k);
    if (it == transforms_.end()) it = transforms_.emplace(k, BesselTransform(g_, kind, order)).first;
    return it->second;
  }

  SmoothBump g_;
  double int_g_ = 0.0, int_g_log_ = 0.0;
  std::vector<std::int64_t> d_, r_;
  std::map<ChiKey, std::vector<cplx>> tau_;
  std::unique_ptr<arith::CuspFormCoeffs> cusp_;
  std::map<std::pair<int, int>, BesselTransform> transforms_;
};

inline cplx voronoi_lhs(const VoronoiCase& vc, const SmoothBump& g) { return VoronoiVerifier(g).lhs(vc); }

inline DualExpansion voronoi_rhs(const VoronoiCase& vc, const SmoothBump& g, double tol) {
  if (tol < 1e-10) throw std::invalid_argument("voronoi_rhs: tol must be >= 1e-10");
  RhsOptions o;
  o.tol = tol;
  auto r = VoronoiVerifier(g).rhs(vc, o);
  if (!r.converged) throw DualSumError("voronoi_rhs: dual sum did not converge", r);
  return r;
}

}  // namespace sconv::voronoi
