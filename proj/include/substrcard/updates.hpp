#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "substrcard/estimator.hpp"

namespace substrcard {

/// In-memory buffer of inserted (or deleted) strings with a height-bounded
/// trie over their suffixes. Every node counts the distinct buffered strings
/// containing its path.
class DeltaBuffer {
 public:
  DeltaBuffer(std::uint32_t height, std::uint64_t budget);

  /// Throws std::invalid_argument for invalid strings.
  void add(Text s);

  /// Distinct buffered strings containing `pattern`: the trie count when
  /// |pattern| <= height, otherwise a scan of the raw strings.
  std::uint64_t count(TextView pattern) const;
  /// Trie count for a path of length <= height; 0 when absent.
  std::uint64_t path_count(TextView path) const;

  /// Trie nodes, excluding the root.
  std::size_t node_count() const { return nodes_.size() - 1; }
  bool over_budget() const { return node_count() > budget_; }
  const std::vector<Text>& raw() const { return raw_; }
  bool empty() const { return raw_.empty(); }
  std::uint32_t height() const { return height_; }
  std::uint64_t budget() const { return budget_; }
  void clear();

 private:
  struct Node {
    std::map<Char, std::uint32_t> children;
    std::uint64_t cnt = 0;
    std::uint64_t stamp = 0;
  };

  std::uint32_t height_;
  std::uint64_t budget_;
  std::vector<Node> nodes_;
  std::vector<Text> raw_;
};

enum class UpdateStrategy { kSingle, kMultiple };

/// One built index and the dataset file it was built from.
struct IndexPart {
  CardinalityIndex index;
  std::filesystem::path source;
};

struct ConsolidationReport {
  UpdateStrategy strategy = UpdateStrategy::kSingle;
  bool full_merge = false;
  std::uint64_t strings_indexed = 0;
  double build_seconds = 0.0;
  std::vector<Text> unmatched_deletes;
};

/// A set of index parts plus insert/delete buffers.
///
/// Single writer, many readers: estimate() takes a shared lock, every
/// mutation an exclusive one, so a consolidation is atomic for readers.
class IndexSet {
 public:
  /// New part datasets are written to `work_dir`.
  IndexSet(BuildParams params, UpdateStrategy strategy, std::uint64_t budget,
           std::filesystem::path work_dir);
  IndexSet(const IndexSet&) = delete;
  IndexSet& operator=(const IndexSet&) = delete;

  /// Builds the first part from a dataset file.
  void add_part_from(const std::filesystem::path& dataset);
  void add_part(CardinalityIndex index, std::filesystem::path source);

  /// Buffers `s`; runs consolidate() when the insert buffer outgrows the
  /// budget and returns its report.
  std::optional<ConsolidationReport> insert(Text s);
  /// Buffers a deletion; a delete buffer over budget forces a full merge.
  /// Unknown strings are accepted here and reported at the next full merge.
  std::optional<ConsolidationReport> remove(Text s);

  Estimate estimate(TextView pattern) const;

  /// Single strategy: full_merge(). Multiple strategy: build a new part from
  /// the insert buffer; deletions stay buffered. nullopt when nothing to do.
  std::optional<ConsolidationReport> consolidate();
  /// Rebuilds one part from every part's dataset plus inserts minus deletes.
  /// Throws std::runtime_error when a part's dataset file is missing.
  ConsolidationReport full_merge();

  BuildParams params() const { return params_; }
  UpdateStrategy strategy() const { return strategy_; }
  std::uint64_t budget() const { return budget_; }
  const std::filesystem::path& work_dir() const { return work_dir_; }
  std::size_t part_count() const;
  const IndexPart& part(std::size_t k) const { return parts_[k]; }
  const DeltaBuffer& insert_buffer() const { return inserts_; }
  const DeltaBuffer& delete_buffer() const { return deletes_; }

  /// Persists the set under work_dir: manifest.json, one index file per part,
  /// and the buffered strings.
  void save() const;
  /// Opens a set written by save().
  static std::unique_ptr<IndexSet> open(const std::filesystem::path& dir);

 private:
  std::optional<ConsolidationReport> consolidate_locked();
  ConsolidationReport full_merge_locked();
  std::filesystem::path next_dataset_path();

  BuildParams params_;
  UpdateStrategy strategy_;
  std::uint64_t budget_;
  std::filesystem::path work_dir_;
  std::uint64_t next_part_id_ = 0;
  std::vector<IndexPart> parts_;
  DeltaBuffer inserts_;
  DeltaBuffer deletes_;
  mutable std::shared_mutex mu_;
};

inline Estimate estimate_combined(const IndexSet& set, TextView pattern) {
  return set.estimate(pattern);
}

}  // namespace substrcard
