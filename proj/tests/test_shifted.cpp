#include <gtest/gtest.h>

#include "sconv/arith.hpp"
#include <random>

#include "sconv/shifted.hpp"

using namespace sconv;
using namespace sconv::shifted;

TEST(Hyperbola, RecoversDivisorFunctionBelowQ) {
  const HyperbolaState H(3000);
  const auto d = arith::divisor_table(3000);
  for (std::int64_t n = 1; n < 3000; ++n) ASSERT_NEAR(H.divisor_sum(n), static_cast<double>(d[n]), 1e-12) << n;
  EXPECT_EQ(H.K(1, static_cast<std::int64_t>(std::ceil(H.support_bound(1))), 10.0), 0.0);
  EXPECT_GT(H.K(1, 3, 10.0), 0.0);
}

TEST(Brute, MatchesDoubleLoop) {
  const auto f = TestFunction::dyadic_skew(100);
  const ConvolutionSpec s{{SeqKind::divisor}, {SeqKind::divisor3}, 2, 1, 3, f};
  const arith::FactorSieve sv(500);
  const auto d2 = arith::divisor_k_table(500, 2, sv), d3 = arith::divisor_k_table(500, 3, sv);
  double direct = 0.0;
  for (std::int64_t n = 1; n <= 200; ++n)
    for (std::int64_t m = 1; m <= 400; ++m)
      if (2 * n - m == 3) direct += static_cast<double>(d2[n] * d3[m]) * f(2.0 * n, static_cast<double>(m));
  EXPECT_NEAR(brute_shifted_sum(s), direct, 1e-9 * std::abs(direct));
}

TEST(ConvolutionSpec, Validation) {
  const auto f = TestFunction::dyadic(100);
  EXPECT_THROW((ConvolutionSpec{{SeqKind::divisor}, {SeqKind::divisor}, 1, 1, 0, f}.validate()),
               std::invalid_argument);
  EXPECT_THROW((ConvolutionSpec{{SeqKind::divisor}, {SeqKind::divisor}, 0, 1, 1, f}.validate()),
               std::invalid_argument);
  EXPECT_THROW((SequenceSpec{SeqKind::tau_chi, arith::prime_character(5, 1)}.table(10)), std::invalid_argument);
}

TEST(LemCon, IdentityHoldsExactly) {
  const auto u = special::SmoothBump::plateau(0.5, 30, 120, 200.5);
  const auto v = special::SmoothBump::standard(0.5, 170);
  auto f = [&](std::int64_t n, std::int64_t m) { return u(static_cast<double>(n)) * v(static_cast<double>(m)); };
  for (std::int64_t h : {1, 4, 9}) {
    const auto r = lem_con_check(f, h, 200);
    EXPECT_GT(r.rhs, 0.0);
    EXPECT_NEAR(r.lhs, r.rhs, 1e-10 * r.rhs) << h;
    const auto g = lem_con_check(f, h, 200, 3, 2);
    EXPECT_NEAR(g.lhs, g.rhs, 1e-10 * g.rhs) << h;
  }
}

TEST(MainTerm, BinaryDivisorNearBrute) {
  const auto f = TestFunction::dyadic(1024);
  const ConvolutionSpec s{{SeqKind::divisor}, {SeqKind::divisor}, 1, 1, 2, f};
  const double b = brute_shifted_sum(s), m = main_term_binary_d(s, delta::default_Q(1024));
  EXPECT_LT(std::abs(b - m), 1e-2 * b);
}

TEST(MainTerm, TauChiAndR) {
  const auto f = TestFunction::dyadic(2048);
  const auto chi = arith::prime_character(3, 1);
  const ConvolutionSpec s{{SeqKind::tau_chi, chi}, {SeqKind::tau_chi, chi}, 1, 1, 6, f};
  const double b = brute_shifted_sum(s), m = main_term_tau_chi(s, delta::default_Q(2048), chi);
  // envelope constants frozen in the criterion 11 config
  EXPECT_LT(std::abs(b - m), 0.11 * std::pow(2048.0, 0.75));
  const ConvolutionSpec bad{{SeqKind::tau_chi, chi}, {SeqKind::tau_chi, chi}, 1, 1, 2, f};
  EXPECT_THROW(main_term_tau_chi(bad, 50, chi), std::invalid_argument);
  const ConvolutionSpec r{{SeqKind::r}, {SeqKind::r}, 1, 1, 4, f};
  EXPECT_LT(std::abs(brute_shifted_sum(r) - main_term_r(r, delta::default_Q(2048))), 3.5 * std::pow(2048.0, 0.75));
}

TEST(Quadratic, MainTermWithoutDuals) {
  const auto f = TestFunction::dyadic(512);
  const ConvolutionSpec s{{SeqKind::divisor}, {SeqKind::divisor}, 2, 1, 1, f};
  QuadraticOptions o;
  o.dual = false;
  const auto r = quadratic_pipeline(s, o);
  EXPECT_GT(r.brute, 0.0);
  EXPECT_LT(std::abs(r.error()), 0.1 * r.brute);
  EXPECT_DOUBLE_EQ(r.Q, 512.0);
}

TEST(Fit, RecoversPowerLaw) {
  std::vector<double> X, e;
  for (int k = 10; k <= 18; ++k) {
    X.push_back(std::ldexp(1.0, k));
    e.push_back(-3.0 * std::pow(X.back(), 0.6));
  }
  const auto F = fit_error_exponent(X, e);
  EXPECT_NEAR(F.alpha, 0.6, 1e-12);
  EXPECT_NEAR(F.c, 3.0, 1e-9);
  EXPECT_NEAR(F.alpha_stderr, 0.0, 1e-9);
  e[2] = 0.0;
  EXPECT_THROW(fit_error_exponent(X, e), std::domain_error);
  EXPECT_THROW(fit_error_exponent(std::vector<ExperimentReport>(3)), std::invalid_argument);
}

TEST(Brute, CuspCoefficients) {
  const auto f = TestFunction::dyadic(300);
  const ConvolutionSpec s{{SeqKind::divisor}, {SeqKind::cusp}, 1, 1, 2, f};
  const auto d = arith::divisor_table(700);
  const auto a = arith::ramanujan_tau_table(700).a;
  double direct = 0.0;
  for (std::int64_t n = 300; n <= 600; ++n) direct += d[n] * a[n - 2] * f(n, n - 2.0);
  EXPECT_NEAR(brute_shifted_sum(s), direct, 1e-12 * (1 + std::abs(direct)));
  EXPECT_THROW(SequenceSpec{SeqKind::cusp}.table(10), std::invalid_argument);
}

TEST(Fit, NoisyPowerLaw) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> noise(-0.1, 0.1);
  std::vector<double> X, e;
  for (int k = 10; k <= 18; ++k) {
    X.push_back(std::ldexp(1.0, k));
    e.push_back(2.0 * std::pow(X.back(), 0.6) * (1 + noise(rng)));
  }
  EXPECT_NEAR(fit_error_exponent(X, e).alpha, 0.6, 0.05);
}

TEST(MainTerm, DoublingQStaysInsideEnvelope) {
  for (int k : {12, 14}) {
    const double X = std::ldexp(1.0, k);
    const ConvolutionSpec s{{SeqKind::divisor}, {SeqKind::divisor}, 1, 1, 1, TestFunction::dyadic(X)};
    const double Q = delta::default_Q(X);
    EXPECT_LT(std::abs(main_term_binary_d(s, 2 * Q) - main_term_binary_d(s, Q)), 0.92 * std::pow(X, 0.75)) << k;
  }
}
