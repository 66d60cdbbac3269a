#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "substrcard/ebwt.hpp"
#include "substrcard/rank_function.hpp"

namespace substrcard {

/// Construction parameters.
///   h        maximum tree height (edges from the root)
///   l        minimum row count for a non-root node to survive
///   c_m      minimum bucket size for fitting below the root
///   epsilon  spline error bound
struct BuildParams {
  std::uint32_t h = 3;
  std::uint64_t l = 5000;
  std::uint64_t c_m = 10;
  std::uint64_t epsilon = 32;
  FitKind fit = FitKind::kSpline;

  /// Throws std::invalid_argument unless h, l, c_m >= 1.
  void validate() const;

  friend bool operator==(const BuildParams&, const BuildParams&) = default;
};

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct SuffixTreeNode {
  Char edge_char = 0;  // meaningless for the root
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  // Distinct strings among the rows of [start, end].
  std::uint64_t cnt = 0;
  std::uint32_t depth = 0;
  NodeId parent = kNoNode;
  // Ascending by edge character, which is also ascending by row.
  std::vector<NodeId> children;
  // Ascending by character.
  std::vector<std::pair<Char, RankFunction>> rank_fns;

  std::uint64_t size() const { return end - start + 1; }
  bool is_leaf() const { return children.empty(); }
  const RankFunction* rank_fn(Char c) const;
};

/// Height-bounded prefix of the suffix tree over the sorted rotations. Node 0
/// is the root.
class SuffixTree {
 public:
  SuffixTree() = default;

  NodeId root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }
  const SuffixTreeNode& node(NodeId id) const { return nodes_[id]; }
  SuffixTreeNode& node(NodeId id) { return nodes_[id]; }

  /// Appends `n` and links it below n.parent (kNoNode only for the first
  /// node). Children must be added in ascending edge order.
  NodeId add_node(SuffixTreeNode n);

  NodeId child(NodeId u, Char c) const;
  /// Child of `u` whose interval holds `row`, or kNoNode.
  NodeId child_containing(NodeId u, std::uint64_t row) const;
  /// Node reached by following the characters of `s`; root for empty `s`.
  NodeId locate_path(TextView s) const;

  std::size_t function_count() const;

 private:
  std::vector<SuffixTreeNode> nodes_;
};

/// A bucket of same-character L-triples at one node, in row order.
/// `owned[k]` is false for boundary knots pushed up from a fitted child.
struct Bucket {
  std::vector<LTriple> triples;
  std::vector<bool> owned;
  bool needs_build = false;

  std::size_t size() const { return triples.size(); }
};

/// One fitted function and the points it was fitted on.
struct FitRecord {
  NodeId node = kNoNode;
  Char ch = 0;
  std::vector<LTriple> inputs;
  // Rows of the triples this function is responsible for (not boundaries).
  std::vector<std::uint64_t> owned_rows;
};

struct PushupTrace {
  std::vector<FitRecord> fits;
};

/// Level-by-level construction: at depth d the rows of every surviving node
/// are grouped by their d-th rotation character and a group becomes a child
/// if it holds at least `l` rows. Nodes reached through a sentinel edge are
/// not expanded.
SuffixTree build_tree(const Ebwt& out, const BuildParams& p);

/// Post-order bucket assignment and pushup. Rows of a node not covered by
/// any surviving child are bucketed at that node. A flagged bucket with at
/// least c_m triples is fitted and only its first and last triples move up;
/// a smaller one moves up whole and flags the parent. Unflagged buckets
/// (boundary knots only) move up whole. The root fits every non-empty bucket.
void assign_and_pushup(SuffixTree& tree, const Ebwt& out, const BuildParams& p,
                       PushupTrace* trace = nullptr);

inline NodeId locate_path(const SuffixTree& tree, TextView s) {
  return tree.locate_path(s);
}

}  // namespace substrcard
