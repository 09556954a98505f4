#include <gtest/gtest.h>

#include <numbers>

#include "bandbraid/pipeline.hpp"
#include "test_support.hpp"

using namespace bandbraid;
using bandbraid::testing::params;
using bandbraid::testing::run_config;

namespace {

BraidWord word(const std::string& text, int n) { return BraidWord::parse(text, n); }

TracedBraid trace_circle(int n, cplx lambda, cplx mu, TraceConfig cfg = {}) {
  const BranchedDiskModel m(n, {});
  const auto p = params(lambda, mu);
  return trace_braid(m, p, assemble_loop(default_rho(m, {}, {}), 0.3, {}), cfg);
}

}  // namespace

TEST(LiftFiber, Examples) {
  const auto two = lift_fiber(1.0, 2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_LT(std::abs(two[0] - 1.0), 1e-15);
  EXPECT_LT(std::abs(two[1] + 1.0), 1e-15);

  const auto three = lift_fiber(-0.001, 3);
  ASSERT_EQ(three.size(), 3u);
  const double angles[] = {std::numbers::pi / 3, std::numbers::pi, 5 * std::numbers::pi / 3};
  for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(three[j] - std::polar(0.1, angles[j])), 1e-15);

  EXPECT_THROW(lift_fiber(0.0, 3), ZeroFiber);
}

TEST(StrandState, CircleLiftsRotate) {
  const BranchedDiskModel m(3, {});
  const auto loop = assemble_loop(0.3, 0.0, {});
  const auto s0 = strand_state(m, params(0.1), loop, 0.0);
  const auto s1 = strand_state(m, params(0.1), loop, 1.2);
  ASSERT_EQ(s0.lifts.size(), 3u);
  for (int j = 0; j < 3; ++j) {
    EXPECT_LT(std::abs(std::pow(s0.lifts[j], 3) - 0.3), 1e-14);
    EXPECT_LT(std::abs(s1.lifts[j] - s0.lifts[j] * std::polar(1.0, 0.4)), 1e-14);
  }
  const auto end = strand_state(m, params(0.1), loop, kTwoPi);
  for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(end.lifts[j] - s0.lifts[(j + 1) % 3]), 1e-13);
}

TEST(TraceBraid, SingleCrossingLambda) {
  const auto t = trace_circle(2, 0.1, 0.0);
  EXPECT_EQ(t.word, word("s1", 2));
  EXPECT_EQ(t.permutation, (std::vector<int>{1, 0}));
  EXPECT_TRUE(monodromy_consistent(t));
}

TEST(TraceBraid, SingleCrossingMu) {
  const auto t = trace_circle(2, 0.0, 0.1);
  EXPECT_EQ(t.word, word("s1^-1", 2));
  EXPECT_TRUE(monodromy_consistent(t));
}

TEST(TraceBraid, FourStrandBlocks) {
  const BranchedDiskModel m(4, {});
  const auto loop = assemble_loop(0.3, 0.3, {});
  const auto t = trace_braid(m, params(0.1), loop);
  ASSERT_EQ(t.word.size(), 3u);
  const auto cls = classify_events(t, loop);
  ASSERT_EQ(cls.even_block.size(), 1u);
  ASSERT_EQ(cls.odd_block.size(), 2u);
  EXPECT_EQ(t.events[cls.even_block[0]].k, 2);
  std::vector<int> odd{t.events[cls.odd_block[0]].k, t.events[cls.odd_block[1]].k};
  std::sort(odd.begin(), odd.end());
  EXPECT_EQ(odd, (std::vector<int>{1, 3}));
  EXPECT_EQ(cls.block_sign, 1);
}

TEST(TraceBraid, StableUnderToleranceHalving) {
  for (int n = 2; n <= 5; ++n) {
    const auto a = trace_circle(n, 0.1, 0.0);
    const auto b = trace_circle(n, 0.1, 0.0, TraceConfig{}.halved());
    EXPECT_EQ(a.word, b.word) << n;
  }
}

TEST(Trefoil, DetourEventsAndCancellingTube) {
  const auto r = run_pipeline(run_config(2, {{1.0, 3, 0}}, 0.1));
  ASSERT_TRUE(r.ok()) << r.error;
  EXPECT_TRUE(cyclically_equal(r.traced->word, word("s1 s1 s1", 2)));
  const auto& cls = *r.classification;
  ASSERT_EQ(cls.detours.size(), 1u);
  const auto& d = cls.detours[0];
  ASSERT_EQ(d.arc.size(), 2u);
  for (std::size_t i : d.arc) {
    EXPECT_EQ(r.traced->events[i].k, 1);
    EXPECT_EQ(r.traced->events[i].sign, 1);
  }
  ASSERT_EQ(d.outbound.size(), d.inbound.size());
  for (std::size_t i = 0; i < d.outbound.size(); ++i) {
    const auto& out = r.traced->events[d.outbound[i]];
    const auto& in = r.traced->events[d.inbound[d.inbound.size() - 1 - i]];
    EXPECT_EQ(out.k, in.k);
    EXPECT_EQ(out.sign, -in.sign);
  }
}

TEST(Trefoil, BandTemplate) {
  const auto r = run_pipeline(run_config(2, {{1.0, 3, 0}}, 0.1));
  ASSERT_TRUE(r.ok()) << r.error;
  ASSERT_TRUE(r.match);
  const auto& rep = r.match->representation;
  EXPECT_TRUE(rep.even_block.empty());
  EXPECT_EQ(rep.odd_block, word("s1", 2));
  ASSERT_EQ(rep.bands.size(), 1u);
  EXPECT_EQ(rep.bands[0].k, 1);
  EXPECT_EQ(rep.bands[0].epsilon, 1);
  EXPECT_TRUE(cyclically_equal(rep.expand(), word("s1 s1 s1", 2)));
  EXPECT_TRUE(r.match->cyclically_equal);
  const auto surface = band_euler_characteristic(rep);
  EXPECT_EQ(surface.euler_characteristic, -1);
  EXPECT_EQ(surface.genus, (Rational{1, 1}));
}

TEST(Regime, Classification) {
  EXPECT_EQ(classify_regime(params(0.1, 0.0)), Regime::LambdaDominant);
  EXPECT_EQ(classify_regime(params(0.0, 0.1)), Regime::MuDominant);
  EXPECT_EQ(classify_regime(params(0.001, 0.1)), Regime::MuDominant);
  EXPECT_EQ(classify_regime(params(0.1, 0.1)), Regime::NotApplicable);
  EXPECT_EQ(regime_sign(Regime::MuDominant), -1);
}

TEST(Template, MirrorBlocksAreNegative) {
  const auto r = run_pipeline(run_config(4, {}, 0.0, 0.1));
  ASSERT_TRUE(r.ok()) << r.error;
  EXPECT_EQ(r.regime, Regime::MuDominant);
  const auto& rep = r.match->representation;
  EXPECT_EQ(rep.even_block, word("s2^-1", 4));
  EXPECT_EQ(rep.odd_block.size(), 2u);
  for (const auto& l : rep.odd_block.letters()) EXPECT_EQ(l.exponent, -1);
  EXPECT_TRUE(rep.bands.empty());
}
