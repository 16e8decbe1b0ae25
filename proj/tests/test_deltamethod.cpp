#include <gtest/gtest.h>

#include "sconv/deltamethod.hpp"
#include "sconv/shifted/test_function.hpp"

using namespace sconv;
using namespace sconv::delta;

TEST(DeltaSymbol, ExactAtModerateQ) {
  const DeltaKernel k(40.0);
  EXPECT_NEAR(delta_symbol(k, 0), 1.0, 1e-10);
  for (std::int64_t m = 1; m <= 2000; ++m) {
    ASSERT_NEAR(delta_symbol(k, m), 0.0, 1e-10) << m;
    ASSERT_NEAR(delta_symbol(k, -m), 0.0, 1e-10) << m;
  }
}

TEST(DeltaKernel, VanishesBeyondQmax) {
  const DeltaKernel k(30.0);
  const auto qm = k.q_max(500.0);
  for (std::int64_t q = qm + 1; q < qm + 20; ++q)
    for (double u : {0.0, 10.0, 400.0}) ASSERT_EQ(k(q, u), 0.0);
  EXPECT_GT(k.constant_part(1), 0.0);
}

TEST(DeltaKernel, DefaultQ) { EXPECT_NEAR(default_Q(1e4), std::pow(1e4, 0.55), 1e-9); }

TEST(KernelE, AnalyticPartialsMatchFiniteDifferences) {
  const double X = 1000;
  const ShiftKernelE E(shifted::TestFunction::dyadic(X, "standard"), 1, DeltaKernel(default_Q(X)));
  for (std::int64_t q : {1, 3, 10})
    for (double x : {1300.0, 1500.0, 1700.0})
      for (double y : {1250.0, 1490.0}) {
        for (auto [i, j] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
          const double a = kernel_E(E, x, y, q, i, j);
          // Richardson step removes the h^2 term of the central differences.
          const double fd = (4 * kernel_E_fd(E, x, y, q, i, j, 5e-3) - kernel_E_fd(E, x, y, q, i, j, 1e-2)) / 3;
          const double scale = std::abs(E(x, y, q)) / std::pow(X / 50, i + j) + 1e-300;
          ASSERT_NEAR(a, fd, 1e-4 * scale + 1e-7 * std::abs(a)) << q << " " << x << " " << y << " " << i << j;
        }
      }
  EXPECT_EQ(E(900.0, 1500.0, 1), 0.0);
  EXPECT_THROW(E.partial(1500.0, 1500.0, 1, 3, 2), std::invalid_argument);
}
