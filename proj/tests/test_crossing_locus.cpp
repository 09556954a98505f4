#include <gtest/gtest.h>

#include <cmath>

#include "bandbraid/crossing_locus.hpp"
#include "test_support.hpp"

using namespace bandbraid;
using bandbraid::testing::params;
using bandbraid::testing::torus_model;

namespace {

constexpr cplx I{0.0, 1.0};

/// Lift of z(theta) = center + radius e^{i theta} to the sheet w = i sqrt(-z); continuous while Re(-z) > 0.
LiftedPath left_half_plane_lift(cplx center, double radius) {
  return [=](double t) {
    const cplx z = center + std::polar(radius, t);
    const cplx w = I * std::sqrt(-z);
    const cplx dz = I * std::polar(radius, t);
    return std::pair{w, dz / (2.0 * w)};
  };
}

}  // namespace

TEST(Coincidence, Examples) {
  const auto m = torus_model(2, 3);
  for (double t : {-0.5, -0.1, 0.0, 0.2, 0.9}) EXPECT_LT(std::abs(eval_coincidence(m, params(0.1), 1, I * t)), 1e-15);
  EXPECT_NEAR(eval_coincidence(m, params(0.1), 1, 1.0), 2.2, 1e-14);
  const BranchedDiskModel lin(2, {});
  EXPECT_NEAR(eval_coincidence(lin, params(1.0), 1, {0.3, -0.7}), 0.6, 1e-15);
}

TEST(Coincidence, GradientMatchesDifferences) {
  const BranchedDiskModel m(3, {{{0.4, 0.1}, 4, 0}, {{0.2, -0.3}, 1, 3}});
  const CoincidenceFunction a(m, params({0.1, 0.02}, 0.03, {0.0002, 0.0}), 1);
  const cplx w{0.3, -0.2};
  const double h = 1e-6;
  const auto g = a.gradient(w);
  EXPECT_NEAR(g[0], (a(w + h) - a(w - h)) / (2 * h), 1e-8);
  EXPECT_NEAR(g[1], (a(w + I * h) - a(w - I * h)) / (2 * h), 1e-8);
}

TEST(TripleCoincidences, NoneForTwoSheets) {
  EXPECT_TRUE(find_triple_coincidences(torus_model(2, 3), params(0.1)).empty());
}

TEST(TripleCoincidences, NoneForDistinctLines) {
  EXPECT_TRUE(find_triple_coincidences(BranchedDiskModel(3, {}), params(0.1, 0.02)).empty());
}

TEST(TripleCoincidences, ResidualsAndSignChanges) {
  const auto m = torus_model(3, 4);
  const auto p = params(0.1, 0.02);
  const auto triples = find_triple_coincidences(m, p);
  ASSERT_FALSE(triples.empty());
  for (const auto& t : triples) {
    const CoincidenceFunction ak(m, p, t.k), al(m, p, t.l);
    EXPECT_LT(std::abs(ak(t.w)), 1e-10);
    EXPECT_LT(std::abs(al(t.w)), 1e-10);
    EXPECT_LT(std::abs(t.image_z - std::pow(t.w, 3)), 1e-14);
    // both functions change sign on a small ring around the root
    bool kpos = false, kneg = false, lpos = false, lneg = false;
    for (int j = 0; j < 64; ++j) {
      const cplx w = t.w + std::polar(1e-4, kTwoPi * j / 64);
      (ak(w) > 0 ? kpos : kneg) = true;
      (al(w) > 0 ? lpos : lneg) = true;
    }
    EXPECT_TRUE(kpos && kneg && lpos && lneg);
  }
}

TEST(SampleLocus, TrefoilContainsNegativeRealAxis) {
  const auto locus = sample_locus(torus_model(2, 3), params(0.1), 64);
  for (double x : {0.002, 0.01, 0.05, 0.1, 0.2}) EXPECT_LT(locus.distance_to(-x), locus.cell_size) << x;
  EXPECT_GT(locus.distance_to(0.1), 0.01);
}

TEST(SampleLocus, LinearModelIsNegativeRealAxis) {
  const auto locus = sample_locus(BranchedDiskModel(2, {}), params(1.0), 64);
  ASSERT_FALSE(locus.polylines.empty());
  for (const auto& pl : locus.polylines)
    for (cplx z : pl.points) {
      EXPECT_LT(std::abs(z.imag()), 1e-9);
      EXPECT_LE(z.real(), 1e-12);
    }
}

TEST(SampleLocus, RefinementConverges) {
  const auto m = torus_model(2, 3);
  const auto coarse = sample_locus(m, params(0.1), 48);
  const auto fine = sample_locus(m, params(0.1), 96);
  EXPECT_LT(hausdorff_distance(coarse, fine), coarse.cell_size);
}

TEST(SampleLocus, TrefoilSingularPoint) {
  // a_1 = x (0.2 + 2x^2 - 6y^2): the two branches cross at w = +-i/sqrt(30), z = -1/30
  const auto locus = sample_locus(torus_model(2, 3), params(0.1), 64);
  ASSERT_EQ(locus.singular_candidates.size(), 1u);
  EXPECT_LT(std::abs(locus.singular_candidates[0] + 1.0 / 30.0), 1e-9);
}

TEST(PathIntersections, SmallCircleMeetsLocusOnce) {
  const double rho = 0.02;
  const CoincidenceFunction a(torus_model(2, 3), params(0.1), 1);
  LiftedPath lift = [rho](double t) {
    const cplx w = std::polar(std::sqrt(rho), t / 2);
    return std::pair{w, I * w / 2.0};
  };
  const auto hits = path_locus_intersections(a, lift, 0.0, kTwoPi);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_NEAR(hits[0].theta, std::numbers::pi, 1e-9);
  EXPECT_GT(std::abs(hits[0].slope), 1e-6);
}

TEST(PathIntersections, DetourCircleMeetsLocusTwice) {
  const CoincidenceFunction a(torus_model(2, 3), params(0.1), 1);
  EXPECT_EQ(path_locus_intersections(a, left_half_plane_lift(-0.1, 0.02), 0.0, kTwoPi).size(), 2u);
}

TEST(PathIntersections, DisjointPath) {
  const CoincidenceFunction a(torus_model(2, 3), params(0.1), 1);
  LiftedPath lift = [](double t) {
    const cplx z = 0.1 + std::polar(0.02, t);
    const cplx w = std::sqrt(z);
    return std::pair{w, I * std::polar(0.02, t) / (2.0 * w)};
  };
  EXPECT_TRUE(path_locus_intersections(a, lift, 0.0, kTwoPi).empty());
}
