// Sieve-backed arithmetic functions: d, d_k, r, r*, tau_chi, mu, phi and
// the normalized Ramanujan tau coefficients of the weight 12 cusp form.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <utility>
#include <vector>

#include "sconv/common.hpp"

namespace sconv::arith {

using PrimePower = std::pair<std::int64_t, int>;

/// Smallest-prime-factor table on [2, limit].
class FactorSieve {
 public:
  explicit FactorSieve(std::int64_t limit) : limit_(limit) {
    if (limit < 2) throw std::invalid_argument("FactorSieve: limit must be >= 2");
    spf_.assign(static_cast<std::size_t>(limit) + 1, 0);
    for (std::int64_t i = 2; i <= limit; ++i) {
      if (spf_[i] != 0) continue;
      spf_[i] = static_cast<std::uint32_t>(i);
      if (i > limit / i) continue;
      for (std::int64_t j = i * i; j <= limit; j += i)
        if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
    }
  }

  std::int64_t limit() const noexcept { return limit_; }

  std::int64_t spf(std::int64_t n) const {
    check(n);
    if (n < 2) throw std::out_of_range("FactorSieve::spf: n < 2");
    return spf_[n];
  }

  bool is_prime(std::int64_t n) const { return n >= 2 && spf(n) == n; }

  std::vector<PrimePower> factorize(std::int64_t n) const {
    check(n);
    std::vector<PrimePower> out;
    while (n > 1) {
      const std::int64_t p = spf_[n];
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
    return out;
  }

  /// Divisors in increasing order.
  std::vector<std::int64_t> divisors(std::int64_t n) const {
    std::vector<std::int64_t> divs{1};
    for (auto [p, e] : factorize(n)) {
      const std::size_t base = divs.size();
      std::int64_t pk = 1;
      for (int k = 1; k <= e; ++k) {
        pk *= p;
        for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
      }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
  }

  int mobius(std::int64_t n) const {
    int mu = 1;
    for (auto [p, e] : factorize(n)) {
      if (e > 1) return 0;
      mu = -mu;
    }
    return mu;
  }

  std::int64_t euler_phi(std::int64_t n) const {
    std::int64_t phi = n;
    for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
    return phi;
  }

 private:
  void check(std::int64_t n) const {
    if (n < 1 || n > limit_) throw std::out_of_range("FactorSieve: argument outside [1, limit]");
  }

  std::int64_t limit_;
  std::vector<std::uint32_t> spf_;
};

inline FactorSieve build_sieve(std::int64_t limit) { return FactorSieve(limit); }

/// Number of ordered k-tuples with product n: prod C(e + k - 1, k - 1).
inline std::uint64_t divisor_k(std::int64_t n, int k, const FactorSieve& sieve) {
  if (k < 1) throw std::invalid_argument("divisor_k: k must be >= 1");
  if (n > sieve.limit()) throw std::out_of_range("divisor_k: n exceeds sieve limit");
  std::uint64_t out = 1;
  for (auto [p, e] : sieve.factorize(n)) {
    std::uint64_t c = 1;
    for (int i = 1; i <= k - 1; ++i) c = c * static_cast<std::uint64_t>(e + i) / static_cast<std::uint64_t>(i);
    out *= c;
  }
  return out;
}

/// d_k(n) for all n <= limit from the sieve factorizations.
inline std::vector<std::int64_t> divisor_k_table(std::int64_t limit, int k, const FactorSieve& sieve) {
  std::vector<std::int64_t> t(static_cast<std::size_t>(limit) + 1, 0);
  for (std::int64_t n = 1; n <= limit; ++n) t[n] = static_cast<std::int64_t>(divisor_k(n, k, sieve));
  return t;
}

inline std::vector<std::int64_t> divisor_table(std::int64_t limit) {
  std::vector<std::int64_t> t(static_cast<std::size_t>(limit) + 1, 0);
  for (std::int64_t d = 1; d <= limit; ++d)
    for (std::int64_t m = d; m <= limit; m += d) ++t[m];
  return t;
}

// ---------------------------------------------------------------------------
// Dirichlet characters

enum class Parity { even, odd };

class DirichletCharacter {
 public:
  DirichletCharacter(std::int64_t modulus, std::vector<cplx> values)
      : modulus_(modulus), values_(std::move(values)) {
    if (modulus < 1 || static_cast<std::int64_t>(values_.size()) != modulus)
      throw std::invalid_argument("DirichletCharacter: value table must have one entry per residue");
    parity_ = (modulus_ > 2 && std::abs(values_[modulus_ - 1] + 1.0) < 1e-12) ? Parity::odd : Parity::even;
    primitive_ = compute_primitive();
  }

  std::int64_t modulus() const noexcept { return modulus_; }
  Parity parity() const noexcept { return parity_; }
  bool primitive() const noexcept { return primitive_; }
  bool is_principal() const {
    for (std::int64_t a = 0; a < modulus_; ++a)
      if (gcd(a, modulus_) == 1 && std::abs(values_[a] - 1.0) > 1e-12) return false;
    return true;
  }
  bool is_real() const {
    for (const auto& v : values_)
      if (std::abs(v.imag()) > 1e-12) return false;
    return true;
  }

  cplx operator()(std::int64_t a) const { return values_[mod(a, modulus_)]; }
  const std::vector<cplx>& values() const noexcept { return values_; }

  DirichletCharacter conj() const {
    std::vector<cplx> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::conj(values_[i]);
    return DirichletCharacter(modulus_, std::move(v));
  }

 private:
  // Induced from modulus c/l for a prime l | c iff chi(a) = 1 whenever a = 1 mod c/l.
  bool compute_primitive() const {
    if (modulus_ == 1) return true;
    std::vector<std::int64_t> primes;
    std::int64_t m = modulus_;
    for (std::int64_t l = 2; l * l <= m; ++l) {
      if (m % l != 0) continue;
      primes.push_back(l);
      while (m % l == 0) m /= l;
    }
    if (m > 1) primes.push_back(m);
    for (const std::int64_t l : primes) {
      const std::int64_t d = modulus_ / l;
      bool induced = true;
      for (std::int64_t a = 1; a < modulus_ && induced; a += d)
        if (gcd(a, modulus_) == 1 && std::abs(values_[a] - 1.0) > 1e-12) induced = false;
      if (induced) return false;
    }
    return true;
  }

  std::int64_t modulus_;
  std::vector<cplx> values_;
  Parity parity_;
  bool primitive_;
};

/// The odd character mod 4: 1, 0, -1, 0 on residues 1, 2, 3, 0.
inline DirichletCharacter chi4() { return DirichletCharacter(4, {0.0, 1.0, 0.0, -1.0}); }

inline DirichletCharacter principal_character(std::int64_t c) {
  std::vector<cplx> v(static_cast<std::size_t>(c));
  for (std::int64_t a = 0; a < c; ++a) v[a] = gcd(a, c) == 1 ? 1.0 : 0.0;
  return DirichletCharacter(c, std::move(v));
}

/// Character mod an odd prime p sending the least primitive root g to e(j/(p-1)).
/// Odd exactly when j is odd; primitive for j != 0 mod (p-1).
inline DirichletCharacter prime_character(std::int64_t p, std::int64_t j) {
  if (p < 3) throw std::invalid_argument("prime_character: need an odd prime");
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) throw std::invalid_argument("prime_character: modulus not prime");
  std::int64_t g = 2;
  for (;; ++g) {
    bool ok = true;
    std::int64_t x = 1;
    for (std::int64_t k = 1; k < p - 1; ++k) {
      x = x * g % p;
      if (x == 1) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  std::vector<cplx> v(static_cast<std::size_t>(p), 0.0);
  std::int64_t x = 1;
  for (std::int64_t k = 0; k < p - 1; ++k) {
    v[x] = e_frac(j * k, p - 1);
    x = x * g % p;
  }
  return DirichletCharacter(p, std::move(v));
}

// ---------------------------------------------------------------------------
// Divisor sums of characters

inline int chi4_value(std::int64_t n) {
  const std::int64_t r = mod(n, 4);
  return r == 1 ? 1 : (r == 3 ? -1 : 0);
}

/// r(n) = 4 sum_{d | n} chi4(d), by trial division over divisors.
inline std::int64_t sum_two_squares(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("sum_two_squares: n must be >= 1");
  std::int64_t s = 0;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    s += chi4_value(d);
    if (d * d != n) s += chi4_value(n / d);
  }
  return 4 * s;
}

/// r*(n) = sum_{m1 m2 = n} chi4(m1)(1 - (-1)^{m1}).
inline std::int64_t r_star(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("r_star: n must be >= 1");
  std::int64_t s = 0;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    auto term = [](std::int64_t m1) { return chi4_value(m1) * ((m1 & 1) ? 2 : 0); };
    s += term(d);
    if (d * d != n) s += term(n / d);
  }
  return s;
}

/// tau_chi(n) = sum_{d | n} chi(d).
inline cplx tau_chi(std::int64_t n, const DirichletCharacter& chi) {
  if (n < 1) throw std::invalid_argument("tau_chi: n must be >= 1");
  KahanSum<cplx> s;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    s.add(chi(d));
    if (d * d != n) s.add(chi(n / d));
  }
  return s.value();
}

/// Tabulated sum_{d|n} chi(d) for n <= limit (index 0 unused).
inline std::vector<cplx> tau_chi_table(std::int64_t limit, const DirichletCharacter& chi) {
  std::vector<cplx> t(static_cast<std::size_t>(limit) + 1, 0.0);
  for (std::int64_t d = 1; d <= limit; ++d) {
    const cplx c = chi(d);
    if (c == 0.0) continue;
    for (std::int64_t m = d; m <= limit; m += d) t[m] += c;
  }
  return t;
}

inline std::vector<std::int64_t> r_table(std::int64_t limit) {
  std::vector<std::int64_t> t(static_cast<std::size_t>(limit) + 1, 0);
  for (std::int64_t d = 1; d <= limit; d += 2) {
    const int c = chi4_value(d);
    for (std::int64_t m = d; m <= limit; m += d) t[m] += 4 * c;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Ramanujan tau

using BigInt = boost::multiprecision::checked_int256_t;

struct CuspFormCoeffs {
  int weight = 12;
  std::vector<BigInt> tau;  // exact tau(n), index 0 unused
  std::vector<double> a;    // tau(n) / n^{11/2}

  std::int64_t limit() const { return static_cast<std::int64_t>(a.size()) - 1; }
};

/// Coefficients of q prod (1 - q^n)^24 via the power recurrence applied to the
/// pentagonal-number series of prod (1 - q^n).
inline CuspFormCoeffs ramanujan_tau_table(std::int64_t limit) {
  if (limit < 1) throw std::invalid_argument("ramanujan_tau_table: limit must be >= 1");
  const std::int64_t len = limit;  // coefficients F_0 .. F_{limit-1}
  std::vector<std::pair<std::int64_t, int>> pent;  // (exponent, sign)
  for (std::int64_t k = 1;; ++k) {
    const std::int64_t e1 = k * (3 * k - 1) / 2, e2 = k * (3 * k + 1) / 2;
    if (e1 >= len) break;
    const int s = (k & 1) ? -1 : 1;
    pent.emplace_back(e1, s);
    if (e2 < len) pent.emplace_back(e2, s);
  }
  std::vector<BigInt> F(static_cast<std::size_t>(len), 0);
  F[0] = 1;
  // n F_n = sum_k (25 k - n) P_k F_{n-k}  for F = P^24, P_0 = 1.
  for (std::int64_t n = 1; n < len; ++n) {
    BigInt acc = 0;
    for (auto [k, s] : pent) {
      if (k > n) break;
      const std::int64_t c = (25 * k - n) * s;
      acc += BigInt(c) * F[n - k];
    }
    if (acc % n != 0) throw std::logic_error("ramanujan_tau_table: inexact division");
    F[n] = acc / n;
  }
  CuspFormCoeffs out;
  out.tau.assign(static_cast<std::size_t>(limit) + 1, 0);
  out.a.assign(static_cast<std::size_t>(limit) + 1, 0.0);
  for (std::int64_t n = 1; n <= limit; ++n) {
    out.tau[n] = F[n - 1];
    out.a[n] = static_cast<double>(static_cast<long double>(F[n - 1]) /
                                   std::pow(static_cast<long double>(n), 5.5L));
  }
  return out;
}

template <class T>
void write_table_csv(std::ostream& os, const std::vector<T>& table) {
  os << "n,value\n";
  for (std::size_t n = 1; n < table.size(); ++n) os << n << ',' << table[n] << '\n';
}

}  // namespace sconv::arith
