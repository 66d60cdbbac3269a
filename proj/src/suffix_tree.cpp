#include "substrcard/suffix_tree.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace substrcard {

void BuildParams::validate() const {
  if (h < 1) throw std::invalid_argument("h must be >= 1");
  if (l < 1) throw std::invalid_argument("l must be >= 1");
  if (c_m < 1) throw std::invalid_argument("c_m must be >= 1");
}

const RankFunction* SuffixTreeNode::rank_fn(Char c) const {
  auto it = std::lower_bound(
      rank_fns.begin(), rank_fns.end(), c,
      [](const std::pair<Char, RankFunction>& e, Char x) { return e.first < x; });
  if (it == rank_fns.end() || it->first != c) return nullptr;
  return &it->second;
}

NodeId SuffixTree::add_node(SuffixTreeNode n) {
  const auto id = static_cast<NodeId>(nodes_.size());
  if (n.parent != kNoNode) {
    auto& siblings = nodes_[n.parent].children;
    if (!siblings.empty() && nodes_[siblings.back()].edge_char >= n.edge_char)
      throw std::logic_error("children must be added in ascending order");
    siblings.push_back(id);
  }
  nodes_.push_back(std::move(n));
  return id;
}

NodeId SuffixTree::child(NodeId u, Char c) const {
  const auto& kids = nodes_[u].children;
  auto it = std::lower_bound(kids.begin(), kids.end(), c, [&](NodeId v, Char x) {
    return nodes_[v].edge_char < x;
  });
  if (it == kids.end() || nodes_[*it].edge_char != c) return kNoNode;
  return *it;
}

NodeId SuffixTree::child_containing(NodeId u, std::uint64_t row) const {
  const auto& kids = nodes_[u].children;
  auto it = std::upper_bound(kids.begin(), kids.end(), row,
                             [&](std::uint64_t r, NodeId v) { return r < nodes_[v].start; });
  if (it == kids.begin()) return kNoNode;
  const NodeId v = *(it - 1);
  return row <= nodes_[v].end ? v : kNoNode;
}

NodeId SuffixTree::locate_path(TextView s) const {
  if (nodes_.empty()) return kNoNode;
  NodeId u = root();
  for (Char c : s) {
    u = child(u, c);
    if (u == kNoNode) return kNoNode;
  }
  return u;
}

std::size_t SuffixTree::function_count() const {
  std::size_t total = 0;
  for (const auto& n : nodes_) total += n.rank_fns.size();
  return total;
}

SuffixTree build_tree(const Ebwt& out, const BuildParams& p) {
  p.validate();
  SuffixTree tree;
  SuffixTreeNode root;
  root.start = 1;
  root.end = out.rows();
  tree.add_node(std::move(root));

  std::vector<NodeId> frontier{tree.root()};
  for (std::uint32_t d = 0; d < p.h && !frontier.empty(); ++d) {
    std::vector<NodeId> next;
    for (NodeId u : frontier) {
      if (d > 0 && tree.node(u).edge_char == kSentinel) continue;
      const std::uint64_t start = tree.node(u).start;
      const std::uint64_t end = tree.node(u).end;
      std::uint64_t group_start = start;
      for (std::uint64_t row = start; row <= end; ++row) {
        const Char c = out.rotation_char(row, d);
        if (row == end || out.rotation_char(row + 1, d) != c) {
          if (row - group_start + 1 >= p.l) {
            SuffixTreeNode child;
            child.edge_char = c;
            child.start = group_start;
            child.end = row;
            child.depth = d + 1;
            child.parent = u;
            next.push_back(tree.add_node(std::move(child)));
          }
          group_start = row + 1;
        }
      }
    }
    frontier = std::move(next);
  }

  // Distinct string ids per interval.
  const auto& ids = out.row_string_ids();
  std::vector<NodeId> seen(out.string_count(), kNoNode);
  for (NodeId u = 0; u < tree.size(); ++u) {
    auto& n = tree.node(u);
    std::uint64_t cnt = 0;
    for (std::uint64_t row = n.start; row <= n.end; ++row) {
      const std::uint32_t sid = ids[row - 1];
      if (seen[sid] != u) {
        seen[sid] = u;
        ++cnt;
      }
    }
    n.cnt = cnt;
  }
  return tree;
}

namespace {

class Pushup {
 public:
  Pushup(SuffixTree& tree, const Ebwt& out, const BuildParams& p,
         PushupTrace* trace)
      : tree_(tree), triples_(out.l_triples()), p_(p), trace_(trace) {}

  void run() { visit(tree_.root()); }

 private:
  using Buckets = std::map<Char, Bucket>;

  static void append(Bucket& dst, Bucket&& src) {
    dst.triples.insert(dst.triples.end(), src.triples.begin(), src.triples.end());
    dst.owned.insert(dst.owned.end(), src.owned.begin(), src.owned.end());
    dst.needs_build = dst.needs_build || src.needs_build;
  }

  void add_rows(Buckets& b, std::uint64_t from, std::uint64_t to) {
    for (std::uint64_t row = from; row <= to; ++row) {
      const LTriple& t = triples_[row - 1];
      Bucket& bk = b[t.ch];
      bk.triples.push_back(t);
      bk.owned.push_back(true);
      bk.needs_build = true;
    }
  }

  Buckets visit(NodeId u) {
    Buckets b;
    const std::uint64_t start = tree_.node(u).start;
    const std::uint64_t end = tree_.node(u).end;
    std::uint64_t cursor = start;
    const std::vector<NodeId> kids = tree_.node(u).children;
    for (NodeId v : kids) {
      if (tree_.node(v).start > cursor) add_rows(b, cursor, tree_.node(v).start - 1);
      for (auto& [ch, pushed] : visit(v)) append(b[ch], std::move(pushed));
      cursor = tree_.node(v).end + 1;
    }
    if (cursor <= end) add_rows(b, cursor, end);

    const bool is_root = u == tree_.root();
    Buckets up;
    auto& fns = tree_.node(u).rank_fns;
    for (auto& [ch, bk] : b) {
      const bool fit = is_root || (bk.needs_build && bk.size() >= p_.c_m);
      if (!fit) {
        up.emplace(ch, std::move(bk));
        continue;
      }
      fns.emplace_back(ch, p_.fit == FitKind::kSpline
                               ? fit_spline(bk.triples, p_.epsilon)
                               : fit_linear(bk.triples));
      if (trace_ != nullptr) record(u, ch, bk);
      if (is_root) continue;
      Bucket boundary;
      boundary.triples.push_back(bk.triples.front());
      if (bk.size() > 1) boundary.triples.push_back(bk.triples.back());
      boundary.owned.assign(boundary.triples.size(), false);
      up.emplace(ch, std::move(boundary));
    }
    return up;
  }

  void record(NodeId u, Char ch, const Bucket& bk) {
    FitRecord rec;
    rec.node = u;
    rec.ch = ch;
    rec.inputs = bk.triples;
    for (std::size_t k = 0; k < bk.size(); ++k)
      if (bk.owned[k]) rec.owned_rows.push_back(bk.triples[k].row);
    trace_->fits.push_back(std::move(rec));
  }

  SuffixTree& tree_;
  const std::vector<LTriple>& triples_;
  const BuildParams& p_;
  PushupTrace* trace_;
};

}  // namespace

void assign_and_pushup(SuffixTree& tree, const Ebwt& out, const BuildParams& p,
                       PushupTrace* trace) {
  p.validate();
  for (NodeId u = 0; u < tree.size(); ++u) tree.node(u).rank_fns.clear();
  Pushup(tree, out, p, trace).run();
}

}  // namespace substrcard
