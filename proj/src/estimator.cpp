#include "substrcard/estimator.hpp"

#include <algorithm>
#include <stdexcept>

namespace substrcard {

CardinalityIndex::CardinalityIndex(BuildParams params, std::uint64_t string_count,
                                   std::uint64_t rows,
                                   std::vector<AlphabetEntry> alphabet,
                                   SuffixTree tree)
    : params_(params),
      string_count_(string_count),
      rows_(rows),
      alphabet_(std::move(alphabet)),
      tree_(std::move(tree)) {}

CardinalityIndex CardinalityIndex::build(const StringSet& data,
                                         const BuildParams& params,
                                         PushupTrace* trace) {
  params.validate();
  return build(Ebwt::build(data), params, trace);
}

CardinalityIndex CardinalityIndex::build(const Ebwt& out,
                                         const BuildParams& params,
                                         PushupTrace* trace) {
  SuffixTree tree = build_tree(out, params);
  assign_and_pushup(tree, out, params, trace);
  return CardinalityIndex(params, out.string_count(), out.rows(), out.alphabet(),
                          std::move(tree));
}

std::uint64_t CardinalityIndex::occ(Char c) const {
  auto it = std::lower_bound(
      alphabet_.begin(), alphabet_.end(), c,
      [](const AlphabetEntry& e, Char x) { return e.ch < x; });
  if (it == alphabet_.end() || it->ch != c) return 0;
  return it->occ;
}

std::uint64_t rank_lookup(const CardinalityIndex& idx, Char c, std::uint64_t i,
                          QueryStats* stats) {
  if (i == 0 || idx.rows() == 0) return 0;
  i = std::min(i, idx.rows());
  const SuffixTree& tree = idx.tree();
  std::uint64_t visited = 1;
  NodeId u = tree.root();
  for (NodeId v = tree.child_containing(u, i); v != kNoNode;
       v = tree.child_containing(u, i)) {
    u = v;
    ++visited;
  }
  std::uint64_t r = 0;
  for (;;) {
    if (const RankFunction* f = tree.node(u).rank_fn(c)) {
      r = f->evaluate(i);
      break;
    }
    if (u == tree.root()) break;
    u = tree.node(u).parent;
    ++visited;
  }
  if (stats != nullptr) {
    stats->nodes_visited += visited;
    ++stats->rank_lookups;
  }
  return r;
}

std::optional<StartingPoint> find_starting_char(const CardinalityIndex& idx,
                                                TextView pattern,
                                                QueryStats* stats) {
  const std::size_t m = pattern.size();
  if (m == 0 || idx.tree().size() == 0) return std::nullopt;
  const SuffixTree& tree = idx.tree();
  auto probe = [&](std::size_t k) {
    const TextView suffix = pattern.substr(k - 1);
    if (stats != nullptr) stats->nodes_visited += suffix.size() + 1;
    return tree.locate_path(suffix);
  };
  const std::size_t h = idx.params().h;
  std::size_t lo = m > h ? m - h + 1 : 1;
  std::size_t hi = m;
  NodeId best = probe(hi);
  if (best == kNoNode) return std::nullopt;
  // Invariant: P[hi..] is a path, and every k < lo is out of range or fails.
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const NodeId v = probe(mid);
    if (v != kNoNode) {
      hi = mid;
      best = v;
    } else {
      lo = mid + 1;
    }
  }
  return StartingPoint{hi, best};
}

Estimate estimate(const CardinalityIndex& idx, TextView pattern,
                  QueryStats* stats) {
  validate_pattern(pattern);
  const auto start_point = find_starting_char(idx, pattern, stats);
  std::int64_t start = 0, end = -1;
  std::size_t k = pattern.size();
  if (start_point) {
    const SuffixTreeNode& node = idx.tree().node(start_point->node);
    if (start_point->k == 1) return {node.cnt, true, EstimateKind::kStringLevel};
    start = static_cast<std::int64_t>(node.start);
    end = static_cast<std::int64_t>(node.end);
    k = start_point->k;
  } else {
    // Last character pruned from the root: its F interval is still known.
    const auto& alpha = idx.alphabet();
    auto it = std::lower_bound(alpha.begin(), alpha.end(), pattern.back(),
                               [](const AlphabetEntry& e, Char x) { return e.ch < x; });
    if (it == alpha.end() || it->ch != pattern.back())
      return {0, false, EstimateKind::kOccurrenceLevel};
    start = static_cast<std::int64_t>(it->occ);
    end = static_cast<std::int64_t>(it->occ + it->count) - 1;
  }
  for (std::size_t j = k - 1; j >= 1; --j) {
    const Char c = pattern[j - 1];
    const std::uint64_t occ = idx.occ(c);
    if (occ == 0) return {0, false, EstimateKind::kOccurrenceLevel};
    const auto base = static_cast<std::int64_t>(occ);
    const auto before = static_cast<std::int64_t>(
        rank_lookup(idx, c, static_cast<std::uint64_t>(std::max<std::int64_t>(start - 1, 0)), stats));
    const auto upto = static_cast<std::int64_t>(
        rank_lookup(idx, c, static_cast<std::uint64_t>(std::max<std::int64_t>(end, 0)), stats));
    start = base + before;
    end = base + upto - 1;
    if (start > end) return {0, false, EstimateKind::kOccurrenceLevel};
  }
  return {static_cast<std::uint64_t>(end - start + 1), false,
          EstimateKind::kOccurrenceLevel};
}

}  // namespace substrcard
