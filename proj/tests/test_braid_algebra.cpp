#include <gtest/gtest.h>

#include <random>

#include "bandbraid/braid_algebra.hpp"
#include "test_support.hpp"

using namespace bandbraid;

namespace {

BraidWord word(const std::string& text, int n) { return BraidWord::parse(text, n); }

LaurentPolynomial from_map(const std::map<int, long long>& m) {
  LaurentPolynomial p;
  for (const auto& [e, c] : m) p.add(e, c);
  return p;
}

BraidWord random_word(std::mt19937_64& rng, int n, int len) {
  std::uniform_int_distribution<int> gen(1, n - 1), sign(0, 1);
  BraidWord w(n);
  for (int i = 0; i < len; ++i) w.push_back({gen(rng), sign(rng) ? 1 : -1});
  return w;
}

}  // namespace

TEST(BraidWord, ParseAndPrint) {
  const auto w = word("s1 s2^-1 s1 s1", 3);
  EXPECT_EQ(w.size(), 4u);
  EXPECT_EQ(w.to_string(), "s1 s2^-1 s1 s1");
  EXPECT_TRUE(word("", 3).empty());
  EXPECT_THROW(word("s3", 3), ValidationError);
  EXPECT_THROW(word("x1", 3), ParseError);
  EXPECT_THROW(word("s1^2", 3), ParseError);
}

TEST(BraidWord, GroupOperations) {
  EXPECT_TRUE(free_reduce(word("s1 s1^-1", 2)).empty());
  EXPECT_EQ(inverse(word("s1 s2", 3)), word("s2^-1 s1^-1", 3));
  EXPECT_EQ(multiply(word("s1", 2), word("s1 s1", 2)), word("s1 s1 s1", 2));
  EXPECT_THROW(multiply(word("s1", 2), word("s1", 3)), StrandMismatch);
}

TEST(BraidWord, PermutationAndComponents) {
  EXPECT_EQ(permutation(word("s1", 2)), (std::vector<int>{1, 0}));
  EXPECT_EQ(cycle_count(permutation(word("s1 s2", 3))), 1);
  EXPECT_EQ(closure_components(word("s1", 2)), 1);
  EXPECT_EQ(closure_components(word("", 3)), 3);
  EXPECT_EQ(closure_components(word("s1 s1", 2)), 2);
}

TEST(BraidWord, ExponentSum) {
  EXPECT_EQ(exponent_sum(word("s1 s1 s1", 2)), 3);
  EXPECT_EQ(exponent_sum(word("s1 s2^-1", 3)), 0);
}

TEST(Laurent, ArithmeticAndNormalization) {
  const auto t = LaurentPolynomial::t();
  const auto p = (LaurentPolynomial(1) - t) * (LaurentPolynomial(1) + t);
  EXPECT_EQ(p, LaurentPolynomial(1) - t * t);
  EXPECT_EQ(exact_divide(p, LaurentPolynomial(1) - t), LaurentPolynomial(1) + t);
  EXPECT_THROW(exact_divide(p + LaurentPolynomial(1), LaurentPolynomial(1) + t * t * t), NonUnitRemainder);
  const auto tre = LaurentPolynomial::t(5) - LaurentPolynomial::t(6) + LaurentPolynomial::t(7);
  EXPECT_EQ(tre.normalized().to_string(), "t^-1 - 1 + t");
  EXPECT_EQ((-tre).normalized(), tre.normalized());
  EXPECT_TRUE(tre.normalized().is_symmetric());
}

TEST(Burau, Generator) {
  const auto m = reduced_burau(word("s1", 2));
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0][0], -LaurentPolynomial::t());
}

TEST(Burau, WordTimesInverseIsIdentity) {
  const auto w = word("s1 s2^-1 s3 s1 s2", 4);
  EXPECT_EQ(reduced_burau(multiply(w, inverse(w))), identity_matrix(3));
}

TEST(Burau, ConjugateWordsShareCharacteristicPolynomial) {
  const auto a = reduced_burau(word("s1 s2", 3)), b = reduced_burau(word("s2 s1", 3));
  // 2x2: char poly is x^2 - tr x + det
  EXPECT_EQ(a[0][0] + a[1][1], b[0][0] + b[1][1]);
  EXPECT_EQ(determinant(a), determinant(b));
}

TEST(Burau, RepresentationPropertyOnRandomPairs) {
  std::mt19937_64 rng(20261017);
  std::uniform_int_distribution<int> strands(2, 5), len(0, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = strands(rng);
    const auto u = random_word(rng, n, len(rng)), v = random_word(rng, n, len(rng));
    EXPECT_EQ(reduced_burau(multiply(u, v)), multiply(reduced_burau(u), reduced_burau(v)));
  }
}

TEST(Alexander, Examples) {
  EXPECT_EQ(alexander_of_closure(word("s1", 2)), LaurentPolynomial(1));
  EXPECT_EQ(alexander_of_closure(word("s1 s1 s1", 2)).to_string(), "t^-1 - 1 + t");
  EXPECT_EQ(alexander_of_closure(word("s1 s2 s1 s2 s1 s2 s1 s2", 3)), from_map(bandbraid::testing::torus_alexander(3, 4)));
  EXPECT_EQ(alexander_of_closure(word("s1 s2", 3)), LaurentPolynomial(1));
  EXPECT_THROW(alexander_of_closure(word("s1 s1", 2)), NotAKnot);
}

TEST(Alexander, TorusKnotsMatchCyclotomicOracle) {
  for (auto [n, m] : {std::pair{2, 3}, {2, 5}, {2, 7}, {3, 4}, {3, 5}, {4, 5}}) {
    BraidWord w(n);
    for (int r = 0; r < m; ++r)
      for (int k = 1; k < n; ++k) w.push_back({k, 1});
    const auto delta = alexander_of_closure(w);
    EXPECT_EQ(delta, from_map(bandbraid::testing::torus_alexander(n, m))) << n << "," << m;
    EXPECT_TRUE(delta.is_symmetric());
  }
}

TEST(Alexander, InvariantUnderConjugationAndStabilization) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto w = random_word(rng, 3, 7);
    w.push_back({1, 1});
    if (closure_components(w) != 1) continue;
    const auto delta = alexander_of_closure(w);
    EXPECT_TRUE(delta.is_symmetric());
    EXPECT_EQ(alexander_of_closure(rotate(w, 3)), delta);
    BraidWord stab(4, w.letters());
    stab.push_back({3, trial % 2 ? 1 : -1});
    EXPECT_EQ(alexander_of_closure(stab), delta);
  }
}

TEST(NormalForms, CommutationAndRotation) {
  EXPECT_EQ(reduce_with_commutation(word("s1 s3 s1^-1", 4)), word("s3", 4));
  EXPECT_TRUE(cyclically_equal(word("s1 s1 s1 s1^-1 s1", 2), word("s1 s1 s1", 2)));
  EXPECT_TRUE(cyclically_equal(word("s2 s1 s3", 4), word("s1 s3 s2", 4)));
  EXPECT_TRUE(cyclically_equal(word("s1 s2 s2^-1 s3", 4), word("s3 s1", 4)));
  EXPECT_FALSE(cyclically_equal(word("s1 s2", 3), word("s1 s2^-1", 3)));
  EXPECT_FALSE(cyclically_equal(word("s1 s1 s2", 3), word("s1 s2 s2", 3)));
}

TEST(NormalForms, CanonicalFormIsRotationInvariant) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = random_word(rng, 5, 9);
    const auto c = canonical_cyclic_form(w);
    for (std::size_t r = 0; r < w.size(); ++r) EXPECT_EQ(canonical_cyclic_form(rotate(w, r)), c);
  }
}

TEST(BandSurface, Examples) {
  BandRepresentation blocks{3, word("s2", 3), word("s1", 3), {}};
  const auto disk = band_euler_characteristic(blocks);
  EXPECT_EQ(disk.euler_characteristic, 1);
  EXPECT_EQ(disk.genus, (Rational{0, 1}));

  BandRepresentation torus{3, word("s2", 3), word("s1", 3), {}};
  for (int i = 0; i < 3; ++i) torus.bands.push_back({BraidWord(3), 1 + i % 2, 1});
  EXPECT_EQ(band_euler_characteristic(torus).euler_characteristic, -5);
}
