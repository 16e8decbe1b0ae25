#include <gtest/gtest.h>

#include "sconv/arith.hpp"
#include "sconv/expsums.hpp"
#include "sconv/specialfn/bump.hpp"

using namespace sconv;
using namespace sconv::expsums;

TEST(Kloosterman, HandComputedValue) {
  // S(1,1;5) = 2 + 2 cos(4 pi / 5) = (3 - sqrt 5) / 2
  EXPECT_NEAR(kloosterman(1, 1, 5), (3.0 - std::sqrt(5.0)) / 2.0, 1e-13);
  EXPECT_DOUBLE_EQ(kloosterman(7, -3, 1), 1.0);
  EXPECT_THROW(kloosterman(1, 1, 0), std::invalid_argument);
}

TEST(Kloosterman, Symmetries) {
  for (std::int64_t q = 1; q <= 60; ++q)
    for (std::int64_t m = -5; m <= 5; ++m)
      for (std::int64_t n = -5; n <= 5; ++n) {
        ASSERT_NEAR(kloosterman(m, n, q), kloosterman(n, m, q), 1e-10);
        ASSERT_NEAR(kloosterman(m, n, q), kloosterman(m + q, n - 2 * q, q), 1e-10);
      }
}

TEST(Kloosterman, WeilBoundSmallModuli) {
  const arith::FactorSieve s(400);
  for (std::int64_t q = 1; q <= 400; ++q)
    for (std::int64_t m = 1; m <= 6; ++m) {
      const double g = static_cast<double>(gcd(gcd(m, 3), q));
      const double b = static_cast<double>(arith::divisor_k(q, 2, s)) * std::sqrt(g * q);
      ASSERT_LE(std::abs(kloosterman(m, 3, q)), b * (1 + 1e-9)) << q;
    }
}

TEST(Kloosterman, RowAndTableAgree) {
  KloostermanTable T(2, 40);
  for (std::int64_t q = 2; q <= 40; ++q) {
    const auto row = kloosterman_row(3, q);
    for (std::int64_t n = 0; n < q; ++n) {
      ASSERT_NEAR(row[n], kloosterman(3, n, q), 1e-10);
      ASSERT_NEAR(T(3, n, q), row[n], 1e-10);
    }
  }
}

TEST(RamanujanSum, FormulaMatchesDirectSum) {
  EXPECT_DOUBLE_EQ(ramanujan_sum(1, 6), 1.0);
  EXPECT_DOUBLE_EQ(ramanujan_sum(2, 4), -2.0);
  EXPECT_DOUBLE_EQ(ramanujan_sum(0, 12), 4.0);
  for (std::int64_t q = 1; q <= 80; ++q)
    for (std::int64_t h = -20; h <= 20; ++h) {
      ASSERT_NEAR(ramanujan_sum(h, q), ramanujan_sum_direct(h, q), 1e-10);
      ASSERT_NEAR(ramanujan_sum(h, q), kloosterman(h, 0, q), 1e-10);
    }
}

TEST(GaussSum, ModulusAndRealCases) {
  const auto g3 = gauss_sum(arith::prime_character(3, 1));
  EXPECT_NEAR(g3.real(), 0.0, 1e-13);
  EXPECT_NEAR(g3.imag(), std::sqrt(3.0), 1e-13);
  const auto g4 = gauss_sum(arith::chi4());
  EXPECT_NEAR(g4.imag(), 2.0, 1e-13);
  for (std::int64_t p : {5, 7, 11, 13})
    for (std::int64_t j = 1; j < p - 1; ++j)
      EXPECT_NEAR(std::abs(gauss_sum(arith::prime_character(p, j))), std::sqrt(static_cast<double>(p)), 1e-12);
  EXPECT_THROW(gauss_sum(arith::principal_character(5)), std::invalid_argument);
}

TEST(Bilinear, MatchesDirectSumAndFilter) {
  const auto psi = special::SmoothBump::standard(1.0, 2.0);
  BilinearWeight g;
  g.P = 8;
  g.Q = 10;
  g.eval = [&](double p, double q) { return psi(p / 8) * psi(q / 10); };
  std::vector<cplx> a(8, cplx(1.0, 0.0));
  BilinearOptions o;
  const auto r = bilinear_average(a, g, o);
  double direct = 0.0, filtered = 0.0;
  for (std::int64_t p = 9; p < 16; ++p)
    for (std::int64_t q = 11; q < 20; ++q) {
      const double v = g(static_cast<double>(p), static_cast<double>(q)) * kloosterman(1, p, q);
      direct += v;
      if (q % 4 == 0) filtered += v;
    }
  EXPECT_NEAR(r.value.real(), direct, 1e-10);
  o.filter = ModulusFilter::multiples_of_n;
  o.n_modulus = 4;
  EXPECT_NEAR(bilinear_average(a, g, o).value.real(), filtered, 1e-10);
  EXPECT_GT(r.lemma_bound, 0.0);
  EXPECT_NEAR(r.ratio, std::abs(r.value) / r.lemma_bound, 1e-15);
}
