#include <gtest/gtest.h>

#include "sconv/arith.hpp"

using namespace sconv;
using namespace sconv::arith;

TEST(Sieve, FactorizationAndMobius) {
  const FactorSieve s(1000);
  EXPECT_TRUE(s.is_prime(997));
  EXPECT_FALSE(s.is_prime(999));
  EXPECT_EQ(s.mobius(1), 1);
  EXPECT_EQ(s.mobius(6), 1);
  EXPECT_EQ(s.mobius(30), -1);
  EXPECT_EQ(s.mobius(12), 0);
  std::int64_t prod = 1;
  for (auto [p, e] : s.factorize(720))
    for (int k = 0; k < e; ++k) prod *= p;
  EXPECT_EQ(prod, 720);
}

TEST(Divisors, SmallValues) {
  const FactorSieve s(100);
  EXPECT_EQ(divisor_k(12, 2, s), 6u);
  EXPECT_EQ(divisor_k(12, 3, s), 18u);
  EXPECT_EQ(divisor_k(8, 3, s), 10u);
  EXPECT_EQ(divisor_k(1, 4, s), 1u);
}

TEST(Divisors, TableMatchesTrialDivision) {
  const auto d = divisor_table(2000);
  for (std::int64_t n = 1; n <= 2000; ++n) {
    std::int64_t c = 0;
    for (std::int64_t k = 1; k <= n; ++k) c += n % k == 0;
    ASSERT_EQ(d[n], c) << n;
  }
}

TEST(Divisors, D3IsConvolutionOfD) {
  const FactorSieve s(600);
  const auto d2 = divisor_k_table(600, 2, s), d3 = divisor_k_table(600, 3, s);
  for (std::int64_t n = 1; n <= 600; ++n) {
    std::int64_t c = 0;
    for (std::int64_t k = 1; k <= n; ++k)
      if (n % k == 0) c += d2[k];
    ASSERT_EQ(d3[n], c) << n;
  }
}

TEST(SumsOfSquares, MatchLatticeCount) {
  const auto r = r_table(500);
  EXPECT_EQ(r[25], 12);
  EXPECT_EQ(r[5], 8);
  EXPECT_EQ(r[3], 0);
  for (std::int64_t n = 1; n <= 500; ++n) {
    std::int64_t c = 0;
    for (std::int64_t x = -23; x <= 23; ++x)
      for (std::int64_t y = -23; y <= 23; ++y) c += x * x + y * y == n;
    ASSERT_EQ(r[n], c) << n;
    ASSERT_EQ(sum_two_squares(n), c) << n;
  }
}

TEST(Characters, Chi4AndPrimeCharacters) {
  const auto c4 = chi4();
  EXPECT_TRUE(c4.primitive());
  EXPECT_TRUE(c4.is_real());
  EXPECT_EQ(c4.parity(), Parity::odd);
  const auto c5 = prime_character(5, 1);
  EXPECT_FALSE(c5.is_real());
  EXPECT_EQ(c5.parity(), Parity::odd);
  const auto c5sq = prime_character(5, 2);
  EXPECT_TRUE(c5sq.is_real());
  EXPECT_EQ(c5sq.parity(), Parity::even);
  for (std::int64_t a = 0; a < 40; ++a)
    for (std::int64_t b = 0; b < 40; ++b) ASSERT_LT(std::abs(c5(a * b) - c5(a) * c5(b)), 1e-12);
  EXPECT_THROW(prime_character(9, 1), std::invalid_argument);
}

TEST(Characters, TauChiIsDivisorSumOfChi) {
  const auto chi = prime_character(3, 1);
  const auto t = tau_chi_table(300, chi);
  for (std::int64_t n = 1; n <= 300; ++n) {
    cplx s = 0;
    for (std::int64_t a = 1; a <= n; ++a)
      if (n % a == 0) s += chi(a);
    ASSERT_LT(std::abs(t[n] - s), 1e-12) << n;
    ASSERT_LT(std::abs(tau_chi(n, chi) - s), 1e-12) << n;
  }
}

TEST(Characters, RIsFourTimesTauChi4) {
  const auto r = r_table(400);
  const auto t = tau_chi_table(400, chi4());
  for (std::int64_t n = 1; n <= 400; ++n) ASSERT_NEAR(static_cast<double>(r[n]), 4.0 * t[n].real(), 1e-12);
}

TEST(RamanujanTau, KnownCoefficients) {
  const auto c = ramanujan_tau_table(12);
  const long want[] = {0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944};
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(c.tau[n], BigInt(want[n])) << n;
  EXPECT_NEAR(c.a[2], -24.0 / std::pow(2.0, 5.5), 1e-15);
}

TEST(RamanujanTau, Multiplicative) {
  const auto c = ramanujan_tau_table(400);
  EXPECT_EQ(c.tau[6], c.tau[2] * c.tau[3]);
  EXPECT_EQ(c.tau[35], c.tau[5] * c.tau[7]);
  // tau(p^2) = tau(p)^2 - p^11
  EXPECT_EQ(c.tau[4], c.tau[2] * c.tau[2] - BigInt(2048));
  for (std::int64_t n = 1; n <= 400; ++n) ASSERT_LE(std::abs(c.a[n]), static_cast<double>(divisor_table(400)[n]));
}
