#include <gtest/gtest.h>

#include "sconv/arith.hpp"
#include "sconv/voronoi.hpp"
#include "sconv/voronoi/integrals.hpp"

using namespace sconv;
using namespace sconv::voronoi;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), 1.0); }

}  // namespace

TEST(LFunction, ClosedForms) {
  EXPECT_NEAR(l_function_at_one(arith::chi4()).real(), kPi / 4, 1e-12);
  EXPECT_NEAR(l_function_at_one(arith::prime_character(3, 1)).real(), kPi / (3 * std::sqrt(3.0)), 1e-12);
}

TEST(VoronoiVerify, EveryCaseAtSmallModuli) {
  VoronoiVerifier V(special::SmoothBump::standard(1000, 2000));
  const auto chi3 = arith::prime_character(3, 1), chi5 = arith::prime_character(5, 1);
  const std::vector<VoronoiCase> cases = {
      {Sequence::divisor, {}, 12, 7, 3},         {Sequence::tau_chi_coprime, chi3, 12, 5, 2},
      {Sequence::tau_chi_coprime, chi5, 12, 4, 1}, {Sequence::tau_chi_dividing, chi3, 12, 6, 5},
      {Sequence::r_half, {}, 12, 6, 1},          {Sequence::cusp, {}, 12, 5, 3},
  };
  for (const auto& vc : cases) {
    const auto r = V.rhs(vc);
    EXPECT_TRUE(r.converged) << vc.label();
    EXPECT_LT(rel(V.lhs(vc), r.value()), 1e-8) << vc.label();
  }
}

TEST(VoronoiVerify, RejectsBadCases) {
  VoronoiCase bad{Sequence::divisor, {}, 12, 6, 2};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  VoronoiCase r_wrong{Sequence::r_half, {}, 12, 5, 1};
  EXPECT_THROW(r_wrong.validate(), std::invalid_argument);
}

TEST(Integrals, IFiniteAndSymmetricInMN) {
  const double X = 1000;
  const delta::ShiftKernelE E(shifted::TestFunction::dyadic(X), 1, delta::DeltaKernel(delta::default_Q(X)));
  const auto a = integral_I(2, 3, 5, E), b = integral_I(3, 2, 5, E);
  EXPECT_TRUE(a.converged);
  EXPECT_TRUE(std::isfinite(a.value));
  EXPECT_NE(a.value, 0.0);
  // Not symmetric in general, but both sit below the trivial bound.
  const double trivial = 4 * kPi * kPi * X * X * 2.0 / delta::default_Q(X);
  EXPECT_LT(std::abs(a.value), trivial);
  EXPECT_LT(std::abs(b.value), trivial);
  EXPECT_TRUE(integral_I_single(1, 5, E).converged);
}

TEST(Integrals, QuadKernelSupport) {
  const double X = 1000;
  const auto f = shifted::TestFunction::dyadic(X);
  const shifted::HyperbolaState K(2 * X);
  const auto q_end = static_cast<std::int64_t>(std::ceil(K.support_bound(1)));
  EXPECT_EQ(integral_I_quad(1, q_end, 1, K, f, 1, 1).value, 0.0);
  const auto v = integral_I_quad(1, 5, 1, K, f, 1, 1);
  EXPECT_TRUE(v.converged);
  EXPECT_NE(v.value, 0.0);
  EXPECT_THROW(integral_I_quad(1, 5, 2, K, f, 1, 3), std::invalid_argument);
}
