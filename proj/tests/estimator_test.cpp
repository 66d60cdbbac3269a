#include "substrcard/estimator.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

namespace substrcard {
namespace {

using testing::T;

BuildParams params(std::uint32_t h, std::uint64_t l, std::uint64_t c_m, std::uint64_t eps) {
  BuildParams p;
  p.h = h;
  p.l = l;
  p.c_m = c_m;
  p.epsilon = eps;
  return p;
}

TEST(FindStartingChar, ReferenceExample) {
  const auto idx = CardinalityIndex::build(testing::reference_set(), params(2, 5, 2, 0));
  const auto sp = find_starting_char(idx, T("abbc"));
  ASSERT_TRUE(sp.has_value());
  EXPECT_EQ(sp->k, 3u);
  EXPECT_EQ(idx.tree().node(sp->node).start, 12u);
  EXPECT_EQ(idx.tree().node(sp->node).end, 16u);
}

TEST(FindStartingChar, FullPathGivesFirstPosition) {
  const auto idx = CardinalityIndex::build(testing::reference_set(), params(2, 5, 2, 0));
  EXPECT_EQ(find_starting_char(idx, T("bc"))->k, 1u);
  EXPECT_FALSE(find_starting_char(idx, T("bz")).has_value());
}

TEST(FindStartingChar, AgreesWithLinearScan) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const StringSet data = testing::random_set(rng, {40, 12, 4, 0.1});
    const BuildParams p = params(1 + rng() % 4, 1 + rng() % 6, 2, 0);
    const auto idx = CardinalityIndex::build(data, p);
    for (const Text& pat : testing::all_substrings(data, 7)) {
      std::optional<std::size_t> expect;
      const std::size_t lo = pat.size() > p.h ? pat.size() - p.h + 1 : 1;
      for (std::size_t k = pat.size(); k >= lo; --k) {
        if (idx.tree().locate_path(TextView(pat).substr(k - 1)) == kNoNode) break;
        expect = k;
      }
      const auto got = find_starting_char(idx, pat);
      ASSERT_EQ(got.has_value(), expect.has_value());
      if (got) ASSERT_EQ(got->k, *expect);
    }
  }
}

TEST(Estimate, SingleRepeatedString) {
  // h = 1 keeps only single characters in the tree, so "abc" is searched
  // backwards from 'c' and counts both occurrences.
  const auto idx = CardinalityIndex::build(testing::make_set({"abcabc"}), params(1, 1, 1, 0));
  const Estimate e = estimate(idx, T("abc"));
  EXPECT_EQ(e.value, 2u);
  EXPECT_FALSE(e.exact);
  EXPECT_EQ(e.kind, EstimateKind::kOccurrenceLevel);
}

TEST(Estimate, TwoStringsBackwardStep) {
  const auto idx = CardinalityIndex::build(testing::make_set({"ab", "b"}), params(1, 1, 1, 0));
  EXPECT_EQ(estimate(idx, T("ab")).value, 1u);
  const Estimate b = estimate(idx, T("b"));
  EXPECT_EQ(b.value, 2u);
  EXPECT_TRUE(b.exact);
  EXPECT_EQ(b.kind, EstimateKind::kStringLevel);
}

TEST(Estimate, AbsentCharacterGivesZero) {
  const auto idx = CardinalityIndex::build(testing::reference_set(), params(2, 5, 2, 0));
  EXPECT_EQ(estimate(idx, T("z")).value, 0u);
  EXPECT_EQ(estimate(idx, T("bzc")).value, 0u);
  EXPECT_EQ(estimate(idx, T("zbc")).value, 0u);
}

TEST(Estimate, PrunedLastCharacterUsesAlphabetInterval) {
  // 'a' occupies rows 5..8, fewer than l, so it has no root child.
  const auto idx = CardinalityIndex::build(testing::reference_set(), params(2, 5, 2, 0));
  ASSERT_EQ(idx.tree().child(idx.tree().root(), U'a'), kNoNode);
  EXPECT_EQ(estimate(idx, T("a")).value, 4u);
  EXPECT_EQ(estimate(idx, T("aa")).value, 1u);
  EXPECT_EQ(estimate(idx, T("ba")).value, 1u);
}

TEST(Estimate, RejectsInvalidPatterns) {
  const auto idx = CardinalityIndex::build(testing::reference_set(), params(2, 5, 2, 0));
  EXPECT_THROW(estimate(idx, Text()), std::invalid_argument);
  EXPECT_THROW(estimate(idx, Text{U'a', kSentinel}), std::invalid_argument);
}

TEST(RankLookup, ExactModeMatchesExactRank) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const StringSet data = testing::random_set(rng, {40, 12, 5, 0.1});
    const Ebwt out = Ebwt::build(data);
    const auto idx = CardinalityIndex::build(out, params(1 + rng() % 3, 1 + rng() % 6,
                                                         1 + rng() % 4, 0));
    for (const AlphabetEntry& a : out.alphabet())
      for (std::uint64_t i = 0; i <= out.rows(); ++i)
        ASSERT_EQ(rank_lookup(idx, a.ch, i), out.exact_rank(a.ch, i));
    EXPECT_EQ(rank_lookup(idx, U'z', out.rows()), 0u);
  }
}

TEST(Estimate, ExactModeMatchesOracle) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    const StringSet data = testing::random_set(rng, {60, 15, 6, 0.1});
    const auto idx = CardinalityIndex::build(data, params(1 + rng() % 3, 1, 1 + rng() % 4, 0));
    for (const Text& pat : testing::all_substrings(data, 8)) {
      const Estimate e = estimate(idx, pat);
      const std::uint64_t expect = e.kind == EstimateKind::kStringLevel
                                       ? testing::brute_distinct(data, pat)
                                       : testing::brute_occurrences(data, pat);
      ASSERT_EQ(e.value, expect) << testing::S(pat);
      ASSERT_EQ(e.exact, e.kind == EstimateKind::kStringLevel);
    }
  }
}

TEST(Estimate, ShortPatternsInTreeAreExact) {
  std::mt19937_64 rng(34);
  const StringSet data = testing::random_set(rng, {200, 15, 4, 0.1});
  const auto idx = CardinalityIndex::build(data, params(3, 20, 10, 32));
  for (const Text& pat : testing::all_substrings(data, 3)) {
    if (idx.tree().locate_path(pat) == kNoNode) continue;
    const Estimate e = estimate(idx, pat);
    ASSERT_TRUE(e.exact);
    ASSERT_EQ(e.value, testing::brute_distinct(data, pat));
  }
}

TEST(Estimate, ErrorBoundWithLearnedRanks) {
  std::mt19937_64 rng(35);
  for (std::uint64_t eps : {4u, 8u, 32u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const StringSet data = testing::random_set(rng, {300, 15, 4, 0.05});
      const auto idx = CardinalityIndex::build(data, params(2, 10, 5, eps));
      for (const Text& pat : testing::all_substrings(data, 6)) {
        const Estimate e = estimate(idx, pat);
        if (e.kind != EstimateKind::kOccurrenceLevel) continue;
        const auto truth = static_cast<std::int64_t>(testing::brute_occurrences(data, pat));
        const auto err = std::abs(static_cast<std::int64_t>(e.value) - truth);
        ASSERT_LE(err, static_cast<std::int64_t>((2 * eps + 1) * pat.size()));
      }
    }
  }
}

TEST(Estimate, QueryCostGrowsWithHeightTimesLength) {
  std::mt19937_64 rng(36);
  const StringSet data = testing::random_set(rng, {300, 15, 4, 0.05});
  const BuildParams p = params(3, 5, 5, 8);
  const auto idx = CardinalityIndex::build(data, p);
  for (const Text& pat : testing::all_substrings(data, 8)) {
    QueryStats stats;
    estimate(idx, pat, &stats);
    // Binary search probes plus two root-to-leaf-and-back walks per step.
    const std::uint64_t probes = 4 * (p.h + 2) * (p.h + 1);
    ASSERT_LE(stats.nodes_visited, probes + 2 * pat.size() * (2 * p.h + 2));
  }
}

}  // namespace
}  // namespace substrcard
