#include <gtest/gtest.h>

#include <regex>

#include "bandbraid/pipeline.hpp"
#include "bandbraid/report_json.hpp"
#include "bandbraid/svg.hpp"
#include "test_support.hpp"

using namespace bandbraid;
using bandbraid::testing::run_config;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Pipeline, Trefoil) {
  const auto r = run_pipeline(run_config(2, {{1.0, 3, 0}}, 0.1));
  ASSERT_TRUE(r.ok()) << r.error;
  EXPECT_EQ(r.double_points.size(), 1u);
  EXPECT_TRUE(cyclically_equal(r.traced->word, BraidWord::parse("s1 s1 s1", 2)));
  EXPECT_EQ(r.invariants->alexander->to_string(), "t^-1 - 1 + t");
  EXPECT_EQ(r.invariants->band_surface->genus, (Rational{1, 1}));
  for (const auto& c : r.checks) EXPECT_TRUE(c.passed) << c.name;
}

TEST(Pipeline, UnknotThreeStrands) {
  const auto r = run_pipeline(run_config(3, {}, 0.1));
  ASSERT_TRUE(r.ok()) << r.error;
  EXPECT_TRUE(r.double_points.empty());
  EXPECT_TRUE(cyclically_equal(r.traced->word, BraidWord::parse("s2 s1", 3)));
  EXPECT_EQ(*r.invariants->alexander, LaurentPolynomial(1));
}

TEST(Pipeline, BalancedLinearTermsExitTwo) {
  const auto r = run_pipeline(run_config(2, {}, 0.1, 0.1));
  EXPECT_EQ(r.exit_code, kExitGenericity);
  EXPECT_EQ(r.gamma_attempts, 8);
  EXPECT_FALSE(r.traced);
}

TEST(Pipeline, InvalidConfigExitOne) {
  auto c = run_config(2, {}, 0.1);
  c.gamma = 0.5;
  EXPECT_EQ(run_pipeline(c).exit_code, kExitUsage);
}

TEST(Pipeline, NonHolomorphicTerms) {
  auto c = run_config(2, {{1.0, 3, 0}, {{0.2, -0.1}, 2, 2}}, {0.08, 0.06}, 0.002);
  c.r0 = 0.8;
  c.gamma = {0.0001, 0.0002};
  const auto r = run_pipeline(c);
  ASSERT_TRUE(r.ok()) << r.error;
  EXPECT_TRUE(monodromy_consistent(*r.traced));
}

TEST(Pipeline, GammaScheduleShrinks) {
  const auto g = gamma_schedule(run_config(2, {}, 0.1));
  ASSERT_EQ(g.size(), 8u);
  EXPECT_EQ(g[0], cplx{});
  EXPECT_NEAR(std::abs(g[1]), 0.001, 1e-18);
  EXPECT_NEAR(std::abs(g[7]), 0.001 / 64, 1e-18);
}

TEST(Report, DeterministicBytes) {
  const auto cfg = run_config(3, {{1.0, 4, 0}}, 0.1);
  EXPECT_EQ(report_text(run_pipeline(cfg)), report_text(run_pipeline(cfg)));
}

TEST(Report, VerifyPassesAndDetectsTampering) {
  const auto r = run_pipeline(run_config(2, {{1.0, 3, 0}}, 0.1));
  ASSERT_TRUE(r.ok());
  auto j = json::parse(report_text(r));
  for (const auto& c : verify_report(j)) EXPECT_TRUE(c.passed) << c.name;
  j["invariants"]["exponent_sum"] = 5;
  bool any_failed = false;
  for (const auto& c : verify_report(j)) any_failed = any_failed || !c.passed;
  EXPECT_TRUE(any_failed);
  json empty = json::object();
  EXPECT_THROW(verify_report(empty), MissingData);
}

TEST(Report, Schema) {
  const auto j = to_json(run_pipeline(run_config(2, {{1.0, 3, 0}}, 0.1)));
  for (const char* key : {"input", "status", "gamma", "double_points", "genericity", "triple_coincidences", "loop",
                          "braid", "regime", "band_representation", "invariants", "checks"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["regime"], "lambda_dominant");
  EXPECT_EQ(j["invariants"]["alexander"]["-1"], 1);
  EXPECT_EQ(j["invariants"]["alexander"]["0"], -1);
  EXPECT_EQ(j["double_points"][0]["sign"], 1);
}

TEST(Svg, TrefoilBraidHasThreePositiveCrossings) {
  const auto svg = render_svg(run_pipeline(run_config(2, {{1.0, 3, 0}}, 0.1)), SvgView::Braid);
  EXPECT_EQ(count(svg, "class=\"crossing\""), 3u);
  EXPECT_EQ(count(svg, "data-sign=\"+1\""), 3u);
  EXPECT_EQ(count(svg, "class=\"strand-end\""), 2u);
}

TEST(Svg, UnknotFourStrands) {
  const auto svg = render_svg(run_pipeline(run_config(4, {}, 0.1)), SvgView::Braid);
  EXPECT_EQ(count(svg, "class=\"crossing\""), 3u);
  EXPECT_EQ(count(svg, "class=\"strand-end\""), 4u);
}

TEST(Svg, DiskView) {
  const auto svg = render_svg(run_pipeline(run_config(3, {{1.0, 4, 0}}, 0.1)), SvgView::Disk);
  EXPECT_EQ(count(svg, "class=\"detour\""), 3u);
  EXPECT_EQ(count(svg, "class=\"double-point\""), 3u);
  EXPECT_EQ(count(svg, "class=\"base-point\""), 1u);
}

TEST(Svg, MissingData) {
  EXPECT_THROW(render_svg(run_pipeline(run_config(2, {}, 0.1, 0.1)), SvgView::Braid), MissingData);
}
