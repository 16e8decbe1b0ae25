// Kloosterman, Ramanujan and Gauss sums, and the bilinear Kloosterman
// average harness used to measure averaged cancellation over moduli.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "sconv/arith.hpp"
#include "sconv/common.hpp"

namespace sconv::expsums {

inline int mobius_trial(std::int64_t n) {
  int mu = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

inline std::int64_t euler_phi_trial(std::int64_t n) {
  std::int64_t phi = n;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    phi -= phi / p;
  }
  if (n > 1) phi -= phi / n;
  return phi;
}

/// Table of e(k/q), k = 0..q-1.
inline std::vector<cplx> unit_roots(std::int64_t q) {
  std::vector<cplx> t(static_cast<std::size_t>(q));
  for (std::int64_t k = 0; k < q; ++k) t[k] = e_frac(k, q);
  return t;
}

/// Inverses of the units mod q; entry 0 for non-units.
inline std::vector<std::int64_t> inverse_table(std::int64_t q) {
  std::vector<std::int64_t> inv(static_cast<std::size_t>(q), 0);
  if (q == 1) return inv;
  for (std::int64_t x = 1; x < q; ++x)
    if (gcd(x, q) == 1) inv[x] = mod_inverse(x, q);
  return inv;
}

/// S(m, n; q) by direct summation over units x mod q.
inline double kloosterman(std::int64_t m, std::int64_t n, std::int64_t q) {
  if (q < 1) throw std::invalid_argument("kloosterman: q must be >= 1");
  if (q == 1) return 1.0;
  const std::int64_t mr = mod(m, q), nr = mod(n, q);
  KahanSum<cplx> s;
  std::int64_t units = 0;
  for (std::int64_t x = 1; x < q; ++x) {
    if (gcd(x, q) != 1) continue;
    ++units;
    const std::int64_t xi = mod_inverse(x, q);
    s.add(e_frac((mr * x + nr * xi) % q, q));
  }
  const cplx v = s.value();
  if (std::abs(v.imag()) >= 1e-9 * static_cast<double>(units))
    throw std::logic_error("kloosterman: imaginary part above rounding level");
  return v.real();
}

/// c_q(h) = S(h, 0; q) via sum_{d | (h, q)} d mu(q/d).
inline double ramanujan_sum(std::int64_t h, std::int64_t q) {
  if (q < 1) throw std::invalid_argument("ramanujan_sum: q must be >= 1");
  const std::int64_t g = gcd(h, q) == 0 ? q : gcd(h, q);
  std::int64_t s = 0;
  for (std::int64_t d = 1; d <= g; ++d)
    if (g % d == 0) s += d * mobius_trial(q / d);
  return static_cast<double>(s);
}

/// c_q(h) as a direct exponential sum.
inline double ramanujan_sum_direct(std::int64_t h, std::int64_t q) {
  if (q < 1) throw std::invalid_argument("ramanujan_sum_direct: q must be >= 1");
  KahanSum<cplx> s;
  for (std::int64_t x = 0; x < q; ++x)
    if (gcd(x, q) == 1) s.add(e_frac(mod(h, q) * x, q));
  return s.value().real();
}

/// tau(chi) = sum_a chi(a) e(a/c); defined here for primitive chi only.
inline cplx gauss_sum(const arith::DirichletCharacter& chi) {
  if (!chi.primitive() || chi.is_principal())
    throw std::invalid_argument("gauss_sum: character must be primitive and non-principal");
  const std::int64_t c = chi.modulus();
  KahanSum<cplx> s;
  for (std::int64_t a = 1; a < c; ++a) s.add(chi(a) * e_frac(a, c));
  return s.value();
}

/// Cache of Kloosterman sums keyed by (q, m mod q, n mod q).
class KloostermanTable {
 public:
  KloostermanTable(std::int64_t q_lo, std::int64_t q_hi) : q_lo_(q_lo), q_hi_(q_hi) {
    if (q_lo < 1 || q_hi < q_lo) throw std::invalid_argument("KloostermanTable: bad modulus range");
  }

  double operator()(std::int64_t m, std::int64_t n, std::int64_t q) {
    if (q < q_lo_ || q > q_hi_) throw std::out_of_range("KloostermanTable: modulus outside range");
    const auto key = std::make_tuple(q, mod(m, q), mod(n, q));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v = kloosterman(m, n, q);
    cache_.emplace(key, v);
    return v;
  }

  std::size_t size() const { return cache_.size(); }

 private:
  std::int64_t q_lo_, q_hi_;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, double> cache_;
};

/// S(m, n; q) for every residue n mod q at fixed m and q, in O(q^2).
inline std::vector<double> kloosterman_row(std::int64_t m, std::int64_t q) {
  std::vector<double> row(static_cast<std::size_t>(q), 0.0);
  if (q == 1) {
    row[0] = 1.0;
    return row;
  }
  const auto roots = unit_roots(q);
  const auto inv = inverse_table(q);
  const std::int64_t mr = mod(m, q);
  for (std::int64_t n = 0; n < q; ++n) {
    KahanSum<double> s;
    for (std::int64_t x = 1; x < q; ++x) {
      if (inv[x] == 0) continue;
      s.add(roots[(mr * x + n * inv[x]) % q].real());
    }
    row[n] = s.value();
  }
  return row;
}

// ---------------------------------------------------------------------------
// Bilinear averages

/// Smooth weight g(p, q) on [P, 2P] x [Q, 2Q] with a recorded derivative
/// certificate max |d^{i+j} g| P^i Q^j over a sample grid, i, j <= 2.
struct BilinearWeight {
  double P = 0.0;
  double Q = 0.0;
  std::function<double(double, double)> eval;
  double certificate = 0.0;

  double operator()(double p, double q) const {
    if (p < P || p > 2 * P || q < Q || q > 2 * Q) return 0.0;
    return eval(p, q);
  }
};

enum class ModulusFilter { all, multiples_of_n };

struct BilinearResult {
  cplx value;
  double lemma_bound = 0.0;
  double ratio = 0.0;
  bool degenerate = false;
};

struct BilinearOptions {
  std::int64_t h = 1;
  int sign = 1;
  ModulusFilter filter = ModulusFilter::all;
  std::int64_t n_modulus = 1;
  Theta theta = Theta::kim_sarnak;
  double eps = 0.01;
};

/// Right side of the all-moduli bound: (sqrt h + Q) P^{1/2} h^theta ||a|| (hPQ)^eps.
inline double lemma_j_bound(double h, double P, double Q, double norm_a, double theta, double eps) {
  return (std::sqrt(h) + Q) * std::sqrt(P) * std::pow(h, theta) * norm_a * std::pow(h * P * Q, eps);
}

/// Right side of the N | q bound:
/// Q ||a|| (1 + hP/Q^2 + P/N)^{1/2} h^theta (1 + (Q^2/(hP))^theta) (hPQ)^eps.
inline double lemma_blo_bound(double h, double P, double Q, double N, double norm_a, double theta,
                              double eps) {
  return Q * norm_a * std::sqrt(1.0 + h * P / (Q * Q) + P / N) * std::pow(h, theta) *
         (1.0 + std::pow(Q * Q / (h * P), theta)) * std::pow(h * P * Q, eps);
}

/// sum_{P<p<2P} sum_{Q<q<2Q} a_p g(p, q) S(h, +-p; q), with coeffs[i] = a_{p0 + i},
/// p0 = floor(P) + 1, with its bound.
inline BilinearResult bilinear_average(const std::vector<cplx>& coeffs, const BilinearWeight& g,
                                       const BilinearOptions& opt) {
  BilinearResult out;
  const std::int64_t p0 = static_cast<std::int64_t>(std::floor(g.P)) + 1;
  const std::int64_t q_lo = static_cast<std::int64_t>(std::floor(g.Q)) + 1;
  const std::int64_t q_hi = static_cast<std::int64_t>(std::ceil(2 * g.Q)) - 1;
  std::vector<std::int64_t> ps;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::int64_t p = p0 + static_cast<std::int64_t>(i);
    if (static_cast<double>(p) < 2 * g.P) ps.push_back(p);
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) norm2 += std::norm(coeffs[i]);
  if (ps.empty() || q_hi < q_lo || g.P <= 0 || g.Q <= 0) {
    out.degenerate = true;
    return out;
  }
  KahanSum<cplx> total;
  for (std::int64_t q = q_lo; q <= q_hi; ++q) {
    if (opt.filter == ModulusFilter::multiples_of_n && q % opt.n_modulus != 0) continue;
    const auto roots = unit_roots(q);
    const auto inv = inverse_table(q);
    const std::int64_t hr = mod(opt.h, q);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const double gv = g(static_cast<double>(ps[i]), static_cast<double>(q));
      if (gv == 0.0 || coeffs[i] == 0.0) continue;
      const std::int64_t pr = mod(opt.sign * ps[i], q);
      KahanSum<double> s;
      if (q == 1) {
        s.add(1.0);
      } else {
        for (std::int64_t x = 1; x < q; ++x)
          if (inv[x] != 0) s.add(roots[(hr * x + pr * inv[x]) % q].real());
      }
      total.add(coeffs[i] * gv * s.value());
    }
  }
  out.value = total.value();
  const double th = theta_value(opt.theta);
  const double h = static_cast<double>(opt.h);
  out.lemma_bound = opt.filter == ModulusFilter::all
                        ? lemma_j_bound(h, g.P, g.Q, std::sqrt(norm2), th, opt.eps)
                        : lemma_blo_bound(h, g.P, g.Q, static_cast<double>(opt.n_modulus),
                                          std::sqrt(norm2), th, opt.eps);
  out.degenerate = out.lemma_bound == 0.0;
  out.ratio = out.degenerate ? 0.0 : std::abs(out.value) / out.lemma_bound;
  return out;
}

}  // namespace sconv::expsums
