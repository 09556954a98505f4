#include <gtest/gtest.h>

#include "bandbraid/loop_gamma.hpp"
#include "test_support.hpp"

using namespace bandbraid;
using bandbraid::testing::params;
using bandbraid::testing::torus_model;

namespace {

struct TrefoilSetup {
  BranchedDiskModel model = torus_model(2, 3);
  PerturbationParams p = params(0.1);
  std::vector<DoublePoint> dps = find_double_points(model, p).points;
  LocusSample locus = sample_locus(model, p, 64);
};

}  // namespace

TEST(DefaultRho, Rules) {
  const BranchedDiskModel small(3, {}, 0.5);
  EXPECT_DOUBLE_EQ(default_rho(small, {}, {}), 0.3 * 0.125);
  EXPECT_DOUBLE_EQ(default_rho(BranchedDiskModel(3, {}), {}, {}), 0.3);
  TrefoilSetup t;
  EXPECT_NEAR(default_rho(t.model, t.dps, {}), 0.04, 1e-12);
  LoopConfig fixed;
  fixed.rho = 0.05;
  EXPECT_DOUBLE_EQ(default_rho(t.model, t.dps, fixed), 0.05);
}

TEST(BuildLoop, CircleOnlyWithoutDoublePoints) {
  const BranchedDiskModel m(3, {});
  const auto p = params(0.1);
  const auto locus = sample_locus(m, p, 64);
  const double rho = default_rho(m, {}, {});
  const auto loop = build_loop(m, p, {}, {}, locus.singular_candidates, rho);
  ASSERT_EQ(loop.segments.size(), 1u);
  EXPECT_EQ(loop.segments[0].kind, SegmentKind::BaseArc);
  EXPECT_NEAR(loop.segments[0].sweep, kTwoPi, 1e-15);
  EXPECT_DOUBLE_EQ(loop.rho, 0.3);
  const auto rep = validate_loop(m, p, loop, {}, {}, locus.singular_candidates);
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(rep.tube_checks.empty());
  EXPECT_FALSE(rep.transversal_hits.empty());
}

TEST(BuildLoop, TrefoilPassesValidation) {
  TrefoilSetup t;
  const auto loop = build_loop(t.model, t.p, t.dps, {}, t.locus.singular_candidates, 0.02);
  ASSERT_EQ(loop.detours.size(), 1u);
  EXPECT_EQ(loop.segments.size(), 5u);
  const auto rep = validate_loop(t.model, t.p, loop, t.dps, {}, t.locus.singular_candidates);
  EXPECT_TRUE(rep.passed()) << (rep.failures.empty() ? "" : rep.failures.front());
  ASSERT_EQ(rep.tube_checks.size(), 1u);
  EXPECT_TRUE(rep.tube_checks[0].circle_meets_locus_twice);
  EXPECT_EQ(winding_number(loop, t.dps[0].image.z1), 1);
  EXPECT_EQ(winding_number(loop, {}), 1);
  EXPECT_EQ(winding_number(loop, {0.5, 0.5}), 0);
}

TEST(BuildLoop, BaseCircleHitsDependOnRho) {
  // the second branch of A crosses the negative axis at z = -1/30, inside C_rho for rho = 0.04
  TrefoilSetup t;
  auto base_hits = [&](double rho) {
    const auto loop = build_loop(t.model, t.p, t.dps, {}, t.locus.singular_candidates, rho);
    const auto rep = validate_loop(t.model, t.p, loop, t.dps, {}, t.locus.singular_candidates);
    int hits = 0;
    for (const auto& h : rep.transversal_hits) hits += loop.segments[h.segment].kind == SegmentKind::BaseArc;
    return hits;
  };
  EXPECT_EQ(base_hits(0.02), 1);
  EXPECT_EQ(base_hits(0.04), 3);
}

TEST(ValidateLoop, JunctionOnLocusFails) {
  TrefoilSetup t;
  const double rho = 0.02;
  const auto good = build_loop(t.model, t.p, t.dps, {}, t.locus.singular_candidates, rho);
  const Detour& d = good.detours[0];
  const auto moved = resolve_detour(
      rho, {d.center, d.radius, d.tube_half_width, d.mouth_angle, std::numbers::pi, d.double_point});
  ASSERT_TRUE(moved.has_value());
  const auto loop = assemble_loop(rho, good.base_angle, {*moved});
  const auto rep = validate_loop(t.model, t.p, loop, t.dps, {}, t.locus.singular_candidates);
  EXPECT_TRUE(rep.closed);
  ASSERT_EQ(rep.tube_checks.size(), 1u);
  EXPECT_FALSE(rep.tube_checks[0].junction_clear);
  EXPECT_FALSE(rep.passed());
}

TEST(ResolveDetour, RejectsUnreachableMouth) {
  // detour circle straddling C_rho cannot be reached from outside it
  EXPECT_FALSE(resolve_detour(0.1, {{-0.1, 0.0}, 0.05, 0.005, 0.0, std::numbers::pi, 0}).has_value());
}

TEST(Parametrization, ClosedAndContinuous) {
  TrefoilSetup t;
  const auto loop = build_loop(t.model, t.p, t.dps, {}, t.locus.singular_candidates, 0.02);
  const LoopParametrization param(loop);
  EXPECT_LT(std::abs(param.point(0.0) - loop.base_point), 1e-15);
  EXPECT_LT(std::abs(param.point(kTwoPi) - loop.base_point), 1e-15);
  const auto corners = param.corners();
  EXPECT_EQ(corners.size(), loop.segments.size() - 1);
  for (std::size_t i = 0; i < corners.size(); ++i)
    EXPECT_LT(std::abs(param.point(i, corners[i]) - param.point(i + 1, corners[i])), 1e-14);
  // speed is constant: theta is proportional to arc length
  for (double th : {0.1, 1.0, 2.5, 4.0, 6.0})
    EXPECT_NEAR(std::abs(param.derivative(th)), param.total_length() / kTwoPi, 1e-12);
}

TEST(Parametrization, CircleOnlyIsRotation) {
  const auto loop = assemble_loop(0.3, 0.7, {});
  const LoopParametrization param(loop);
  for (double th : {0.0, 0.5, 3.0, 6.0}) EXPECT_LT(std::abs(param.point(th) - std::polar(0.3, 0.7 + th)), 1e-15);
}
