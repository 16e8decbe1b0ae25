#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include "sconv/specialfn.hpp"

using namespace sconv;
using namespace sconv::special;

TEST(Bessel, ReferenceValuesAtOne) {
  EXPECT_NEAR(bessel_j0(1.0), 0.7651976865579666, 1e-15);
  EXPECT_NEAR(bessel_y0(1.0), 0.08825696421567696, 1e-15);
  EXPECT_NEAR(bessel_k0(1.0), 0.42102443824070834, 1e-15);
}

TEST(Bessel, AgreesWithBoostAcrossSwitchover) {
  for (double z = 0.05; z < 150; z *= 1.07) {
    const double env = std::min(1.0, std::sqrt(2.0 / (kPi * z)));
    for (int n = 0; n <= 3; ++n) {
      ASSERT_NEAR(bessel(BesselKind::J, n, z), boost::math::cyl_bessel_j(n, z), 1e-11 * env) << n << " " << z;
      ASSERT_NEAR(bessel(BesselKind::Y, n, z), boost::math::cyl_neumann(n, z),
                  1e-11 * std::max(env, std::abs(boost::math::cyl_neumann(n, z))))
          << n << " " << z;
      const double k = boost::math::cyl_bessel_k(n, z);
      ASSERT_NEAR(bessel(BesselKind::K, n, z), k, 1e-11 * k) << n << " " << z;
    }
  }
}

TEST(Bessel, DerivativeRecurrences) {
  for (double z = 0.1; z < 100; z *= 1.1) {
    // Y_0' = -Y_1, K_0' = -K_1
    EXPECT_NEAR(bessel_derivative(BesselKind::Y, 0, z, 1), -bessel(BesselKind::Y, 1, z), 1e-10);
    EXPECT_NEAR(bessel_derivative(BesselKind::K, 0, z, 1), -bessel(BesselKind::K, 1, z),
                1e-10 * bessel(BesselKind::K, 1, z));
    const double fd = (bessel_y0(z * (1 + 1e-6)) - bessel_y0(z * (1 - 1e-6))) / (2e-6 * z);
    EXPECT_NEAR(bessel_derivative(BesselKind::Y, 0, z, 1), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Bessel, DomainErrors) {
  EXPECT_THROW(bessel(BesselKind::Y, 0, 0.0), std::domain_error);
  EXPECT_THROW(bessel(BesselKind::K, 0, -1.0), std::domain_error);
  EXPECT_THROW(bessel(BesselKind::J, -1, 1.0), std::invalid_argument);
}

TEST(Bump, SupportPlateauAndSmoothness) {
  const auto b = SmoothBump::standard(1.0, 2.0);
  EXPECT_EQ(b(1.0), 0.0);
  EXPECT_EQ(b(2.0), 0.0);
  EXPECT_GT(b(1.5), 0.0);
  const auto p = SmoothBump::plateau(0.0, 1.0, 3.0, 4.0);
  EXPECT_NEAR(p(2.0), 1.0, 1e-15);
  EXPECT_NEAR(p(1.0), 1.0, 1e-15);
  for (double x = 0.05; x < 4; x += 0.05) {
    const double fd = (p(x + 1e-6) - p(x - 1e-6)) / 2e-6;
    ASSERT_NEAR(p.derivative(x, 1), fd, 1e-5);
    ASSERT_LE(std::abs(p.derivative(x, 2)), p.max_derivative(2) * (1 + 1e-9));
  }
}

TEST(Partition, SumsToOne) {
  const DyadicPartition rho;
  for (double x = 0.01; x < 1e5; x *= 1.013) ASSERT_NEAR(rho.partition_sum(x), 1.0, 1e-12) << x;
  EXPECT_EQ(rho(1.0), 0.0);
  EXPECT_EQ(rho(2.0), 0.0);
}

TEST(Quadrature, OscillatoryClosedForm) {
  // int_1^4 cos(10 sqrt x) dx = [t sin(10t)/5 + cos(10t)/50]_1^2
  auto F = [](double t) { return t * std::sin(10 * t) / 5 + std::cos(10 * t) / 50; };
  QuadOptions o;
  o.beta = 10;
  const auto r = oscillatory_integral([](double x) { return std::cos(10 * std::sqrt(x)); }, 1.0, 4.0, o);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, F(2.0) - F(1.0), 1e-12);
}

TEST(Quadrature, FixedGridIntegratesPolynomials) {
  const auto g = FixedGrid::composite(0.0, kPi, 4);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.w[i] * std::sin(g.x[i]);
  EXPECT_NEAR(s, 2.0, 1e-14);
}
