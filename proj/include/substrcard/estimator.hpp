#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "substrcard/ebwt.hpp"
#include "substrcard/string_set.hpp"
#include "substrcard/suffix_tree.hpp"

namespace substrcard {

/// Learned FM-index guided by a pruned suffix tree. Immutable once built;
/// safe for concurrent queries.
class CardinalityIndex {
 public:
  CardinalityIndex() = default;
  CardinalityIndex(BuildParams params, std::uint64_t string_count,
                   std::uint64_t rows, std::vector<AlphabetEntry> alphabet,
                   SuffixTree tree);

  /// Throws std::invalid_argument on an empty or invalid data set or bad
  /// parameters. `trace`, when given, receives every fitted function's input.
  static CardinalityIndex build(const StringSet& data, const BuildParams& params,
                                PushupTrace* trace = nullptr);
  static CardinalityIndex build(const Ebwt& out, const BuildParams& params,
                                PushupTrace* trace = nullptr);

  const BuildParams& params() const { return params_; }
  const SuffixTree& tree() const { return tree_; }
  std::uint64_t string_count() const { return string_count_; }
  std::uint64_t rows() const { return rows_; }
  const std::vector<AlphabetEntry>& alphabet() const { return alphabet_; }

  /// First F row of `c`, or 0 when `c` is not in the alphabet.
  std::uint64_t occ(Char c) const;

 private:
  BuildParams params_;
  std::uint64_t string_count_ = 0;
  std::uint64_t rows_ = 0;
  std::vector<AlphabetEntry> alphabet_;
  SuffixTree tree_;
};

enum class EstimateKind : std::uint8_t { kStringLevel, kOccurrenceLevel };

struct Estimate {
  std::uint64_t value = 0;
  // Served entirely from a tree node's distinct-string count.
  bool exact = false;
  EstimateKind kind = EstimateKind::kStringLevel;
};

/// Optional instrumentation for a single query.
struct QueryStats {
  std::uint64_t nodes_visited = 0;
  std::uint64_t rank_lookups = 0;
};

struct StartingPoint {
  std::size_t k = 0;  // 1-indexed position in the pattern
  NodeId node = kNoNode;
};

/// Learned rank(c, i): descend to the deepest node whose interval holds i,
/// then climb until a node carries a function for c. 0 when c is unknown or
/// i == 0; i past the last row is clamped.
std::uint64_t rank_lookup(const CardinalityIndex& idx, Char c, std::uint64_t i,
                          QueryStats* stats = nullptr);

/// Smallest k in [max(1, |P| - h + 1), |P|] such that P[k..] is a tree path,
/// found by binary search (qualifying k are upward closed). nullopt when the
/// last character has no path.
std::optional<StartingPoint> find_starting_char(const CardinalityIndex& idx,
                                                TextView pattern,
                                                QueryStats* stats = nullptr);

/// Bidirectional estimate. A pattern that is a full tree path returns that
/// node's exact distinct-string count; otherwise the starting node's
/// interval is extended backwards with learned ranks and the resulting
/// occurrence count is returned. When the last character was pruned from
/// the root, its full F interval seeds the backward search. Throws std::invalid_argument for an empty
/// pattern or one containing the sentinel.
Estimate estimate(const CardinalityIndex& idx, TextView pattern,
                  QueryStats* stats = nullptr);

}  // namespace substrcard
