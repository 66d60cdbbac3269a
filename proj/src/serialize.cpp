#include "substrcard/serialize.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <limits>

namespace substrcard {
namespace {

constexpr std::string_view kMagic = "SSC1";

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) u8(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) u8(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::string_view s) { buf_.append(s); }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * k);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_++])) << (8 * k);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  // Guards element counts against the bytes that remain.
  std::uint64_t count(std::size_t min_element_bytes) {
    const std::uint64_t n = u64();
    if (n > (bytes_.size() - pos_) / min_element_bytes)
      throw FormatError("element count exceeds file size");
    return n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("truncated index");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void write_function(Writer& w, Char ch, const RankFunction& f) {
  w.u32(ch);
  w.u8(static_cast<std::uint8_t>(f.kind()));
  if (f.kind() == FitKind::kSpline) {
    w.u64(f.knots().size());
    for (const Knot& k : f.knots()) {
      w.u64(k.row);
      w.u64(k.rank);
    }
  } else {
    w.f64(f.slope());
    w.f64(f.intercept());
    w.u64(f.first().row);
    w.u64(f.first().rank);
    w.u64(f.last().row);
    w.u64(f.last().rank);
  }
}

void write_node(Writer& w, const SuffixTree& tree, NodeId u) {
  const SuffixTreeNode& n = tree.node(u);
  w.u32(n.edge_char);
  w.u64(n.start);
  w.u64(n.end);
  w.u64(n.cnt);
  w.u64(n.children.size());
  w.u64(n.rank_fns.size());
  for (const auto& [ch, f] : n.rank_fns) write_function(w, ch, f);
  for (NodeId v : n.children) write_node(w, tree, v);
}

RankFunction read_function(Reader& r) {
  const auto kind = r.u8();
  if (kind == static_cast<std::uint8_t>(FitKind::kSpline)) {
    const std::uint64_t n = r.count(16);
    if (n == 0) throw FormatError("spline without knots");
    std::vector<Knot> knots(n);
    for (auto& k : knots) {
      k.row = r.u64();
      k.rank = r.u64();
    }
    try {
      return RankFunction::spline(std::move(knots));
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  if (kind == static_cast<std::uint8_t>(FitKind::kLinear)) {
    const double slope = r.f64();
    const double intercept = r.f64();
    Knot first{r.u64(), 0};
    first.rank = r.u64();
    Knot last{r.u64(), 0};
    last.rank = r.u64();
    return RankFunction::linear(slope, intercept, first, last);
  }
  throw FormatError("unknown rank function kind");
}

void read_node(Reader& r, SuffixTree& tree, NodeId parent, std::uint32_t max_depth,
               std::uint64_t& budget) {
  if (budget == 0) throw FormatError("more nodes than declared");
  --budget;
  SuffixTreeNode n;
  n.edge_char = r.u32();
  n.start = r.u64();
  n.end = r.u64();
  n.cnt = r.u64();
  const std::uint64_t children = r.count(44);
  const std::uint64_t fns = r.count(29);
  if (n.start == 0 || n.start > n.end) throw FormatError("bad node interval");
  if (parent != kNoNode) {
    const SuffixTreeNode& p = tree.node(parent);
    if (n.start < p.start || n.end > p.end) throw FormatError("child outside parent");
    n.depth = p.depth + 1;
    if (n.depth > max_depth) throw FormatError("node deeper than h");
  }
  n.parent = parent;
  n.rank_fns.reserve(fns);
  for (std::uint64_t k = 0; k < fns; ++k) {
    const Char ch = r.u32();
    if (!n.rank_fns.empty() && n.rank_fns.back().first >= ch)
      throw FormatError("rank functions out of order");
    n.rank_fns.emplace_back(ch, read_function(r));
  }
  NodeId id;
  try {
    id = tree.add_node(std::move(n));
  } catch (const std::logic_error& e) {
    throw FormatError(e.what());
  }
  for (std::uint64_t k = 0; k < children; ++k) read_node(r, tree, id, max_depth, budget);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_index(const CardinalityIndex& idx) {
  Writer w;
  w.raw(kMagic);
  w.u32(kFormatVersion);
  w.u64(idx.string_count());
  w.u64(idx.rows());
  const BuildParams& p = idx.params();
  w.u64(p.h);
  w.u64(p.l);
  w.u64(p.c_m);
  w.u64(p.epsilon);
  w.u64(idx.alphabet().size());
  for (const AlphabetEntry& e : idx.alphabet()) {
    w.u32(e.ch);
    w.u64(e.occ);
    w.u64(e.count);
  }
  w.u64(idx.tree().size());
  if (idx.tree().size() > 0) write_node(w, idx.tree(), idx.tree().root());
  const std::uint64_t sum = fnv1a64(w.buffer());
  w.u64(sum);
  return std::move(w.buffer());
}

CardinalityIndex deserialize_index(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 4 + 8) throw FormatError("file too short");
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8));
  Reader r(body);
  if (r.raw(kMagic.size()) != kMagic) throw FormatError("bad magic");
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw FormatError("unsupported format version " + std::to_string(version));
  if (tail.u64() != fnv1a64(body)) throw FormatError("checksum mismatch");

  const std::uint64_t string_count = r.u64();
  const std::uint64_t rows = r.u64();
  BuildParams p;
  const std::uint64_t h = r.u64();
  if (h > std::numeric_limits<std::uint32_t>::max()) throw FormatError("bad height");
  p.h = static_cast<std::uint32_t>(h);
  p.l = r.u64();
  p.c_m = r.u64();
  p.epsilon = r.u64();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }

  std::vector<AlphabetEntry> alphabet(r.count(20));
  for (auto& e : alphabet) {
    e.ch = r.u32();
    e.occ = r.u64();
    e.count = r.u64();
  }
  for (std::size_t k = 1; k < alphabet.size(); ++k)
    if (alphabet[k].ch <= alphabet[k - 1].ch || alphabet[k].occ <= alphabet[k - 1].occ)
      throw FormatError("alphabet not ascending");

  std::uint64_t node_budget = r.count(44);
  const std::uint64_t declared = node_budget;
  SuffixTree tree;
  if (declared > 0) read_node(r, tree, kNoNode, p.h, node_budget);
  if (node_budget != 0) throw FormatError("fewer nodes than declared");
  if (!r.done()) throw FormatError("trailing bytes");
  if (p.fit == FitKind::kSpline && tree.size() > 0) {
    // Fit mode is per function on disk; report the root's as the build mode.
    const auto& fns = tree.node(tree.root()).rank_fns;
    if (!fns.empty()) p.fit = fns.front().second.kind();
  }
  return CardinalityIndex(p, string_count, rows, std::move(alphabet), std::move(tree));
}

void save_index(const CardinalityIndex& idx, const std::filesystem::path& path) {
  const std::string bytes = serialize_index(idx);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write index " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

CardinalityIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open index " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return deserialize_index(bytes);
}

}  // namespace substrcard
