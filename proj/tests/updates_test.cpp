#include "substrcard/updates.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <thread>

#include <unistd.h>

#include "substrcard/serialize.hpp"
#include "test_util.hpp"

namespace substrcard {
namespace {

namespace fs = std::filesystem;
using testing::T;

BuildParams params(std::uint32_t h, std::uint64_t l, std::uint64_t c_m, std::uint64_t eps) {
  BuildParams p;
  p.h = h;
  p.l = l;
  p.c_m = c_m;
  p.epsilon = eps;
  return p;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("substrcard_updates_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

fs::path write_set(const fs::path& dir, const std::string& name, const StringSet& s) {
  const fs::path p = dir / name;
  s.save(p);
  return p;
}

TEST(DeltaBuffer, CountsDistinctStringsPerPath) {
  DeltaBuffer buf(2, 100);
  buf.add(T("abc"));
  EXPECT_EQ(buf.node_count(), 5u);  // a ab b bc c
  for (const char* p : {"a", "ab", "b", "bc", "c"}) EXPECT_EQ(buf.path_count(T(p)), 1u) << p;
  EXPECT_EQ(buf.path_count(T("ac")), 0u);

  DeltaBuffer rep(2, 100);
  rep.add(T("aaa"));
  EXPECT_EQ(rep.node_count(), 2u);
  EXPECT_EQ(rep.path_count(T("a")), 1u);
  EXPECT_EQ(rep.path_count(T("aa")), 1u);
}

TEST(DeltaBuffer, MatchesBruteForceOnBothPaths) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const StringSet data = testing::random_set(rng, {30, 10, 4, 0.2});
    DeltaBuffer buf(1 + rng() % 3, 1000);
    for (const Text& s : data) buf.add(s);
    for (const Text& pat : testing::all_substrings(data, 6))
      ASSERT_EQ(buf.count(pat), testing::brute_distinct(data, pat));
    EXPECT_EQ(buf.count(T("zzzz")), 0u);
  }
}

TEST(DeltaBuffer, BudgetAndClear) {
  DeltaBuffer buf(3, 4);
  buf.add(T("ab"));
  EXPECT_FALSE(buf.over_budget());
  buf.add(T("cd"));
  EXPECT_TRUE(buf.over_budget());
  buf.clear();
  EXPECT_TRUE(buf.empty());
  EXPECT_EQ(buf.node_count(), 0u);
}

TEST(IndexSet, EmptyBuffersMatchSinglePart) {
  TempDir dir;
  const StringSet data = testing::reference_set();
  IndexSet set(params(2, 5, 2, 0), UpdateStrategy::kSingle, 100, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", data));
  const auto idx = CardinalityIndex::build(data, set.params());
  for (const Text& pat : testing::all_substrings(data, 4))
    EXPECT_EQ(set.estimate(pat).value, estimate(idx, pat).value);
}

TEST(IndexSet, DeleteOfUniquePatternGivesZero) {
  TempDir dir;
  IndexSet set(params(3, 1, 1, 0), UpdateStrategy::kMultiple, 1000, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", testing::make_set({"xyz", "abc"})));
  EXPECT_EQ(set.estimate(T("xy")).value, 1u);
  set.remove(T("xyz"));
  EXPECT_EQ(set.estimate(T("xy")).value, 0u);
  EXPECT_EQ(set.estimate(T("xyz")).value, 0u);
}

TEST(IndexSet, InsertThenDeleteNetsZero) {
  TempDir dir;
  IndexSet set(params(3, 1, 1, 0), UpdateStrategy::kSingle, 1000, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", testing::make_set({"abc"})));
  set.insert(T("qq"));
  set.remove(T("qq"));
  EXPECT_EQ(set.estimate(T("q")).value, 0u);
  EXPECT_EQ(set.estimate(T("a")).value, 1u);
}

TEST(IndexSet, SingleConsolidationEqualsFreshBuild) {
  TempDir dir;
  std::mt19937_64 rng(52);
  const BuildParams p = params(2, 3, 3, 4);
  const StringSet base = testing::random_set(rng, {50, 12, 4, 0.1});
  const StringSet extra = testing::random_set(rng, {30, 12, 4, 0.1});
  IndexSet set(p, UpdateStrategy::kSingle, 1'000'000, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", base));
  for (const Text& s : extra) set.insert(s);
  set.insert(T("zzzz"));
  set.remove(T("zzzz"));
  // Remove the first two base strings.
  set.remove(base[0]);
  if (base.size() > 1) set.remove(base[1]);
  const auto report = set.consolidate();
  ASSERT_TRUE(report.has_value());
  EXPECT_TRUE(report->full_merge);
  EXPECT_TRUE(report->unmatched_deletes.empty());
  ASSERT_EQ(set.part_count(), 1u);

  std::vector<Text> net(base.begin() + std::min<std::size_t>(2, base.size()), base.end());
  net.insert(net.end(), extra.begin(), extra.end());
  if (net.empty()) GTEST_SKIP();
  const auto fresh = CardinalityIndex::build(StringSet(net), p);
  EXPECT_EQ(serialize_index(set.part(0).index), serialize_index(fresh));
}

TEST(IndexSet, MultipleStrategyIsAdditive) {
  TempDir dir;
  std::mt19937_64 rng(53);
  const BuildParams p = params(2, 3, 3, 4);
  const StringSet d1 = testing::random_set(rng, {50, 12, 4, 0.1});
  const StringSet d2 = testing::random_set(rng, {50, 12, 4, 0.1});
  IndexSet set(p, UpdateStrategy::kMultiple, 1'000'000, dir.path());
  set.add_part_from(write_set(dir.path(), "d1.txt", d1));
  for (const Text& s : d2) set.insert(s);
  ASSERT_TRUE(set.consolidate().has_value());
  ASSERT_EQ(set.part_count(), 2u);
  const auto i1 = CardinalityIndex::build(d1, p);
  const auto i2 = CardinalityIndex::build(d2, p);
  for (const Text& pat : testing::all_substrings(d1, 5))
    ASSERT_EQ(set.estimate(pat).value, estimate(i1, pat).value + estimate(i2, pat).value);
}

TEST(IndexSet, BudgetTriggersConsolidation) {
  TempDir dir;
  IndexSet set(params(2, 1, 1, 0), UpdateStrategy::kMultiple, 5, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", testing::make_set({"abc"})));
  EXPECT_FALSE(set.insert(T("xy")).has_value());
  const auto r = set.insert(T("pqr"));
  ASSERT_TRUE(r.has_value());
  EXPECT_FALSE(r->full_merge);
  EXPECT_EQ(r->strings_indexed, 2u);
  EXPECT_EQ(set.part_count(), 2u);
  EXPECT_TRUE(set.insert_buffer().empty());
  EXPECT_EQ(set.estimate(T("pq")).value, 1u);
}

TEST(IndexSet, DeleteBudgetForcesFullMerge) {
  TempDir dir;
  IndexSet set(params(2, 1, 1, 0), UpdateStrategy::kMultiple, 2, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", testing::make_set({"abc", "de", "fg"})));
  const auto r = set.remove(T("abc"));
  ASSERT_TRUE(r.has_value());
  EXPECT_TRUE(r->full_merge);
  EXPECT_EQ(set.part_count(), 1u);
  EXPECT_EQ(set.estimate(T("a")).value, 0u);
  EXPECT_EQ(set.estimate(T("d")).value, 1u);
}

TEST(IndexSet, UnmatchedDeletesAreReported) {
  TempDir dir;
  IndexSet set(params(2, 1, 1, 0), UpdateStrategy::kSingle, 1000, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", testing::make_set({"abc"})));
  set.remove(T("nothere"));
  const ConsolidationReport r = set.full_merge();
  ASSERT_EQ(r.unmatched_deletes.size(), 1u);
  EXPECT_EQ(r.unmatched_deletes[0], T("nothere"));
  EXPECT_EQ(set.estimate(T("abc")).value, 1u);
}

TEST(IndexSet, EmptyConsolidationIsNoOp) {
  TempDir dir;
  IndexSet set(params(2, 1, 1, 0), UpdateStrategy::kSingle, 1000, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", testing::make_set({"abc"})));
  EXPECT_FALSE(set.consolidate().has_value());
  EXPECT_EQ(set.part_count(), 1u);
}

TEST(IndexSet, DeletingEverythingLeavesNoParts) {
  TempDir dir;
  IndexSet set(params(2, 1, 1, 0), UpdateStrategy::kSingle, 1000, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", testing::make_set({"abc"})));
  set.remove(T("abc"));
  set.full_merge();
  EXPECT_EQ(set.part_count(), 0u);
  EXPECT_EQ(set.estimate(T("a")).value, 0u);
}

TEST(IndexSet, MissingSourceDatasetFails) {
  TempDir dir;
  IndexSet set(params(2, 1, 1, 0), UpdateStrategy::kSingle, 1000, dir.path());
  const fs::path base = write_set(dir.path(), "base.txt", testing::make_set({"abc"}));
  set.add_part_from(base);
  fs::remove(base);
  set.insert(T("x"));
  EXPECT_THROW(set.consolidate(), std::runtime_error);
}

TEST(IndexSet, SaveAndOpenPreserveEstimates) {
  TempDir dir;
  std::mt19937_64 rng(54);
  const StringSet base = testing::random_set(rng, {40, 10, 4, 0.1});
  IndexSet set(params(2, 2, 2, 4), UpdateStrategy::kMultiple, 1'000'000, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", base));
  set.insert(T("abcd"));
  set.consolidate();
  set.insert(T("dcba"));
  set.remove(base[0]);
  set.save();
  const auto back = IndexSet::open(dir.path());
  EXPECT_EQ(back->part_count(), set.part_count());
  EXPECT_EQ(back->strategy(), UpdateStrategy::kMultiple);
  EXPECT_EQ(back->params(), set.params());
  for (const Text& pat : testing::all_substrings(base, 3))
    ASSERT_EQ(back->estimate(pat).value, set.estimate(pat).value);
  // Reopened sets can still merge.
  back->full_merge();
  EXPECT_EQ(back->part_count(), 1u);
}

TEST(IndexSet, OpenRejectsMissingManifest) {
  TempDir dir;
  EXPECT_THROW(IndexSet::open(dir.path()), std::runtime_error);
}

TEST(IndexSet, ReadersRunDuringWrites) {
  TempDir dir;
  IndexSet set(params(2, 1, 2, 0), UpdateStrategy::kMultiple, 50, dir.path());
  set.add_part_from(write_set(dir.path(), "base.txt", testing::make_set({"abc", "bcd"})));
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> queries{0};
  std::vector<std::thread> readers;
  for (int t = 0; t < 3; ++t) {
    readers.emplace_back([&] {
      while (!stop) {
        // Inserts only add strings containing "bc", so the count never drops.
        EXPECT_GE(set.estimate(T("bc")).value, 2u);
        ++queries;
      }
    });
  }
  while (queries == 0) std::this_thread::yield();
  for (int k = 0; k < 200; ++k) set.insert(T("xbcx") + Text(1, static_cast<Char>('a' + k % 26)));
  stop = true;
  for (auto& t : readers) t.join();
  EXPECT_GT(queries.load(), 0u);
  EXPECT_EQ(set.estimate(T("xbcx")).value, 200u);
}

}  // namespace
}  // namespace substrcard
