#include "substrcard/rank_function.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "substrcard/estimator.hpp"
#include "test_util.hpp"

namespace substrcard {
namespace {

// Triples of one character: rows strictly increasing, ranks 1, 2, 3, ...
std::vector<LTriple> random_triples(std::mt19937_64& rng, std::size_t count,
                                    std::uint64_t max_gap) {
  std::uniform_int_distribution<std::uint64_t> gap(1, max_gap);
  std::vector<LTriple> v;
  std::uint64_t row = 0;
  for (std::uint64_t r = 1; r <= count; ++r) {
    row += gap(rng);
    v.push_back({U'x', row, r});
  }
  return v;
}

// Rank step function implied by the triples, at every row of their span.
std::uint64_t step_rank(const std::vector<LTriple>& t, std::uint64_t row) {
  std::uint64_t r = t.front().rank - 1;
  for (const LTriple& x : t)
    if (x.row <= row) r = x.rank;
  return r;
}

std::uint64_t diff(std::uint64_t a, std::uint64_t b) { return a > b ? a - b : b - a; }

TEST(FitSpline, ZeroEpsilonIsExactEverywhere) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = random_triples(rng, 1 + rng() % 60, 1 + rng() % 9);
    const RankFunction f = fit_spline(t, 0);
    for (std::uint64_t row = t.front().row; row <= t.back().row; ++row)
      ASSERT_EQ(f.evaluate(row), step_rank(t, row)) << "row " << row;
  }
}

TEST(FitSpline, ErrorBoundedAtEveryTriple) {
  std::mt19937_64 rng(2);
  for (std::uint64_t eps : {1u, 4u, 8u, 32u}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto t = random_triples(rng, 1 + rng() % 400, 1 + rng() % 30);
      const RankFunction f = fit_spline(t, eps);
      for (const LTriple& x : t) ASSERT_LE(diff(f.evaluate(x.row), x.rank), eps);
      for (std::uint64_t row = t.front().row; row <= t.back().row; ++row)
        ASSERT_LE(diff(f.evaluate(row), step_rank(t, row)), eps);
    }
  }
}

TEST(FitSpline, KnotsAreExactAndMonotone) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = random_triples(rng, 2 + rng() % 200, 1 + rng() % 20);
    const RankFunction f = fit_spline(t, 8);
    for (const Knot& k : f.knots()) EXPECT_EQ(f.evaluate(k.row), k.rank);
    EXPECT_EQ(f.knots().front().row, t.front().row);
    EXPECT_EQ(f.knots().back().row, t.back().row);
    std::uint64_t prev = 0;
    for (std::uint64_t row = 0; row <= t.back().row + 3; ++row) {
      const std::uint64_t v = f.evaluate(row);
      ASSERT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(FitSpline, LargeEpsilonCompresses) {
  std::mt19937_64 rng(4);
  const auto t = random_triples(rng, 5000, 4);
  EXPECT_LT(fit_spline(t, 32).knots().size(), fit_spline(t, 0).knots().size() / 10);
}

TEST(FitSpline, OutsideSupport) {
  const std::vector<LTriple> t = {{U'x', 5, 3}, {U'x', 9, 4}};
  const RankFunction f = fit_spline(t, 0);
  EXPECT_EQ(f.evaluate(1), 2u);
  EXPECT_EQ(f.evaluate(4), 2u);
  EXPECT_EQ(f.evaluate(8), 3u);
  EXPECT_EQ(f.evaluate(100), 4u);
}

TEST(FitSpline, SubBranchBoundaryGapGetsNoCorner) {
  // A rank jump larger than one marks a fitted sub-branch; the step between
  // is unknown so only the two boundary triples are kept.
  const std::vector<LTriple> t = {{U'x', 2, 1}, {U'x', 10, 7}};
  const RankFunction f = fit_spline(t, 0);
  EXPECT_EQ(f.knots().size(), 2u);
}

TEST(FitSpline, RejectsUnorderedInput) {
  const std::vector<LTriple> t = {{U'x', 5, 2}, {U'x', 3, 3}};
  EXPECT_THROW(fit_spline(t, 1), std::invalid_argument);
}

TEST(GreedySpline, CorridorHoldsOnArbitraryMonotonePoints) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Knot> pts;
    std::uint64_t row = rng() % 5, rank = rng() % 5;
    for (std::size_t k = 0; k < 1 + rng() % 300; ++k) {
      pts.push_back({row, rank});
      row += 1 + rng() % 7;
      rank += rng() % 4;
    }
    const std::uint64_t eps = rng() % 10;
    const RankFunction f = RankFunction::spline(greedy_spline(pts, eps));
    for (const Knot& p : pts) ASSERT_LE(diff(f.evaluate(p.row), p.rank), eps);
  }
}

TEST(RankFunctionSpline, RejectsDecreasingKnots) {
  EXPECT_THROW(RankFunction::spline({{3, 2}, {2, 3}}), std::invalid_argument);
  EXPECT_THROW(RankFunction::spline({{1, 3}, {2, 2}}), std::invalid_argument);
  EXPECT_THROW(RankFunction::spline({}), std::invalid_argument);
}

TEST(FitLinear, ExactOnCollinearTriples) {
  const std::vector<LTriple> t = {{U'x', 2, 1}, {U'x', 4, 2}, {U'x', 6, 3}, {U'x', 8, 4}};
  const RankFunction f = fit_linear(t);
  EXPECT_EQ(f.kind(), FitKind::kLinear);
  EXPECT_NEAR(f.slope(), 0.5, 1e-12);
  EXPECT_NEAR(f.intercept(), 0.0, 1e-12);
  for (const LTriple& x : t) EXPECT_EQ(f.evaluate(x.row), x.rank);
}

TEST(FitLinear, SingleTripleIsFlat) {
  const std::vector<LTriple> t = {{U'x', 7, 3}};
  const RankFunction f = fit_linear(t);
  EXPECT_EQ(f.slope(), 0.0);
  EXPECT_EQ(f.evaluate(7), 3u);
}

TEST(FitLinear, ClampsToRankRange) {
  const std::vector<LTriple> t = {{U'x', 10, 1}, {U'x', 11, 2}, {U'x', 12, 3}};
  const RankFunction f = fit_linear(t);
  EXPECT_EQ(f.evaluate(1), 0u);
  EXPECT_EQ(f.evaluate(1000), 3u);
}

TEST(RankLookup, ReferenceExample) {
  BuildParams p;
  p.h = 2;
  p.l = 5;
  p.c_m = 2;
  p.epsilon = 0;
  const auto idx = CardinalityIndex::build(testing::reference_set(), p);
  EXPECT_EQ(rank_lookup(idx, kSentinel, 11), 3u);
}

}  // namespace
}  // namespace substrcard
