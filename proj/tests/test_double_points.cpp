#include <gtest/gtest.h>

#include <cmath>

#include "bandbraid/double_points.hpp"
#include "test_support.hpp"

using namespace bandbraid;
using bandbraid::testing::params;
using bandbraid::testing::torus_model;

namespace {
constexpr cplx I{0.0, 1.0};
}

TEST(PairMismatch, Examples) {
  const auto m = torus_model(2, 3);
  EXPECT_LT(std::abs(pair_mismatch(m, params(0.1), 1, I) - (-1.8 * I)), 1e-14);
  EXPECT_LT(std::abs(pair_mismatch(m, params(0.1), 1, I * std::sqrt(0.1))), 1e-15);
  const BranchedDiskModel empty(4, {});
  for (int k = 1; k < 4; ++k) EXPECT_EQ(pair_mismatch(empty, params(0.1, 0.02), k, 0.0), cplx{});
}

TEST(FindDoublePoints, Trefoil) {
  const auto set = find_double_points(torus_model(2, 3), params(0.1));
  ASSERT_EQ(set.points.size(), 1u);
  const auto& dp = set.points[0];
  EXPECT_LT(std::abs(std::abs(dp.w1) - std::sqrt(0.1)), 1e-12);
  EXPECT_LT(std::abs(dp.w1.real()), 1e-12);
  EXPECT_LT(std::abs(dp.w1 + dp.w2), 1e-12);
  EXPECT_LT(std::abs(dp.image.z1 - cplx{-0.1, 0}), 1e-12);
  EXPECT_LT(std::abs(dp.image.z2), 1e-12);
  EXPECT_EQ(dp.sign, 1);
}

TEST(FindDoublePoints, EmptyWhenLinearAndUnbalanced) {
  for (int n = 2; n <= 5; ++n) EXPECT_TRUE(find_double_points(BranchedDiskModel(n, {}), params(0.1, 0.02)).points.empty());
}

TEST(FindDoublePoints, TorusThreeFour) {
  const auto m = torus_model(3, 4);
  const auto set = find_double_points(m, params(0.1));
  ASSERT_EQ(set.points.size(), 3u);
  for (const auto& dp : set.points) {
    EXPECT_LT(std::abs(std::pow(dp.w1, 3) + 0.1), 1e-12);
    EXPECT_EQ(dp.sign, 1);
  }
  EXPECT_LT(bandbraid::testing::oracle_distance(m, params(0.1), set.points), 1e-8);
}

TEST(Sign, DeterminantAgreesWithTangentBasis) {
  const BranchedDiskModel m(3, {{1.0, 4, 0}, {{0.2, 0.1}, 2, 3}});
  const auto p = params({0.1, 0.02}, 0.01, {0.0003, 0.0001});
  const auto set = find_double_points(m, p);
  ASSERT_FALSE(set.points.empty());
  for (const auto& dp : set.points) EXPECT_EQ(dp.sign, sign_via_tangent_basis(m, p, dp));
}

TEST(Sign, SyntheticCoordinatePlanes) {
  const Jacobian4x2 e12{{{1, 0}, {0, 1}, {0, 0}, {0, 0}}};
  const Jacobian4x2 e34{{{0, 0}, {0, 0}, {1, 0}, {0, 1}}};
  EXPECT_EQ(intersection_sign(e12, e34, 1e-12), 1);
  EXPECT_THROW(intersection_sign(e12, e12, 1e-12), GenericityFailure);
}

TEST(Sign, AntiHolomorphicModelIsNegative) {
  const BranchedDiskModel m(2, {{1.0, 0, 3}});
  const auto p = params(0.0, 0.1);
  const auto set = find_double_points(m, p);
  ASSERT_EQ(set.points.size(), 1u);
  for (const auto& dp : set.points) {
    EXPECT_EQ(dp.sign, -1);
    EXPECT_EQ(sign_via_tangent_basis(m, p, dp), -1);
  }
}

TEST(Genericity, TrefoilPasses) {
  const auto set = find_double_points(torus_model(2, 3), params(0.1));
  const auto rep = check_genericity(set.points, {});
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(check_genericity({}, {}).passed());
}

TEST(Genericity, BalancedLinearTermsAreDegenerate) {
  const BranchedDiskModel m(2, {});
  const auto p = params(0.1, 0.1);
  const auto candidates = find_double_point_candidates(m, p);
  EXPECT_GT(candidates.points.size(), 1u);
  EXPECT_FALSE(check_genericity(candidates.points, {}).passed());
  EXPECT_THROW(find_double_points(m, p), GenericityFailure);
}

TEST(Genericity, DetectsSharedImagesAndTriples) {
  DoublePoint a, b;
  a.transversality_margin = b.transversality_margin = 1.0;
  a.image.z1 = b.image.z1 = {-0.1, 0.0};
  std::vector<DoublePoint> both{a, b};
  EXPECT_FALSE(check_genericity(both, {}).distinct_images);
  std::vector<DoublePoint> one{a};
  const std::vector<cplx> triple{{-0.1, 0.0}};
  EXPECT_FALSE(check_genericity(one, triple).avoids_triple_coincidences);
}

TEST(HolomorphicOracle, Examples) {
  const auto two = holomorphic_oracle(torus_model(2, 3), params(0.1), 1);
  ASSERT_EQ(two.size(), 2u);
  for (cplx w : two) EXPECT_LT(std::abs(w * w + 0.1), 1e-14);

  const auto three = holomorphic_oracle(torus_model(3, 4), params(0.1), 1);
  ASSERT_EQ(three.size(), 3u);
  for (cplx w : three) EXPECT_LT(std::abs(w * w * w + 0.1), 1e-14);

  EXPECT_TRUE(holomorphic_oracle(BranchedDiskModel(3, {}), params(0.1), 2).empty());
  EXPECT_THROW(holomorphic_oracle(torus_model(2, 3), params(0.1, 0.01), 1), PreconditionViolated);
}

TEST(HolomorphicOracle, AgreesWithSolverOnMixedDegrees) {
  const BranchedDiskModel m(4, {{{0.3, -0.2}, 5, 0}, {{-0.4, 0.1}, 7, 0}, {{0.2, 0.45}, 8, 0}});
  const auto p = params(0.1);
  const auto set = find_double_points(m, p);
  EXPECT_LT(bandbraid::testing::oracle_distance(m, p, set.points), 1e-8);
}
