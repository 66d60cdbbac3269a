#include "substrcard/ebwt.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace substrcard {
namespace {

// `at_a(k)` / `at_b(k)` return the k-th character of the sentinel-terminated
// text (k < length).
template <class AtA, class AtB>
std::strong_ordering omega_compare(AtA at_a, std::size_t len_a,
                                   std::size_t off_a, AtB at_b,
                                   std::size_t len_b, std::size_t off_b,
                                   std::size_t skip) {
  const std::size_t limit = len_a + len_b;
  std::size_t ia = (off_a + skip) % len_a;
  std::size_t ib = (off_b + skip) % len_b;
  for (std::size_t k = skip; k < limit; ++k) {
    const Char ca = at_a(ia);
    const Char cb = at_b(ib);
    if (ca != cb) return ca <=> cb;
    if (++ia == len_a) ia = 0;
    if (++ib == len_b) ib = 0;
  }
  return std::strong_ordering::equal;
}

constexpr int kKeyChars = 3;
constexpr int kKeyBits = 21;

}  // namespace

std::strong_ordering compare_rotations(std::span<const Char> a,
                                       std::size_t a_offset,
                                       std::span<const Char> b,
                                       std::size_t b_offset, std::size_t skip) {
  return omega_compare([&](std::size_t k) { return a[k]; }, a.size(), a_offset,
                       [&](std::size_t k) { return b[k]; }, b.size(), b_offset,
                       skip);
}

std::strong_ordering compare_shifts(const CyclicShift& a, const CyclicShift& b,
                                    const StringSet& data) {
  const Text& sa = data[a.string_id];
  const Text& sb = data[b.string_id];
  auto at = [](const Text& s) {
    return [&s](std::size_t k) { return k < s.size() ? s[k] : kSentinel; };
  };
  return omega_compare(at(sa), sa.size() + 1, a.offset - 1, at(sb),
                       sb.size() + 1, b.offset - 1, 0);
}

Ebwt Ebwt::build(const StringSet& data) {
  if (data.empty()) throw std::invalid_argument("cannot build BWT of empty set");
  if (data.size() > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("too many strings");

  Ebwt out;
  out.begin_.reserve(data.size());
  for (const auto& s : data) {
    validate_text(s);
    if (s.size() + 1 > std::numeric_limits<std::uint32_t>::max())
      throw std::invalid_argument("string too long");
    out.begin_.push_back(out.text_.size());
    out.text_.insert(out.text_.end(), s.begin(), s.end());
    out.text_.push_back(kSentinel);
  }
  const std::uint64_t n_rows = out.text_.size();
  auto length_of = [&](std::uint32_t sid) {
    return static_cast<std::uint32_t>(data[sid].size() + 1);
  };

  // Sort by a packed key of the first three rotation characters, then fall
  // back to the full comparison from the fourth character on.
  struct Item {
    std::uint64_t key;
    std::uint32_t sid;
    std::uint32_t off;  // 0-based
  };
  std::vector<Item> items;
  items.reserve(n_rows);
  for (std::uint32_t sid = 0; sid < data.size(); ++sid) {
    const std::uint32_t len = length_of(sid);
    const Char* t = out.text_.data() + out.begin_[sid];
    for (std::uint32_t off = 0; off < len; ++off) {
      std::uint64_t key = 0;
      for (int k = 0; k < kKeyChars; ++k)
        key = (key << kKeyBits) | t[(off + k) % len];
      items.push_back({key, sid, off});
    }
  }
  const Char* base = out.text_.data();
  std::sort(items.begin(), items.end(), [&](const Item& x, const Item& y) {
    if (x.key != y.key) return x.key < y.key;
    const Char* tx = base + out.begin_[x.sid];
    const Char* ty = base + out.begin_[y.sid];
    const auto ord = omega_compare([tx](std::size_t k) { return tx[k]; },
                                   length_of(x.sid), x.off,
                                   [ty](std::size_t k) { return ty[k]; },
                                   length_of(y.sid), y.off, kKeyChars);
    if (ord != 0) return ord < 0;
    return x.sid < y.sid;
  });

  out.shifts_.reserve(n_rows);
  out.row_ids_.reserve(n_rows);
  out.f_chars_.reserve(n_rows);
  out.triples_.reserve(n_rows);
  for (const Item& it : items) {
    const std::uint32_t len = length_of(it.sid);
    out.shifts_.push_back({it.sid, it.off + 1, len});
    out.row_ids_.push_back(it.sid);
    out.f_chars_.push_back(base[out.begin_[it.sid] + it.off]);
  }

  // Alphabet and Occ from the sorted F column.
  for (std::uint64_t row = 1; row <= n_rows; ++row) {
    const Char c = out.f_chars_[row - 1];
    if (out.alphabet_.empty() || out.alphabet_.back().ch != c)
      out.alphabet_.push_back({c, row, 0});
    ++out.alphabet_.back().count;
  }
  std::unordered_map<Char, std::size_t> slot;
  for (std::size_t k = 0; k < out.alphabet_.size(); ++k)
    slot.emplace(out.alphabet_[k].ch, k);

  // One scan assigns global ranks with a per-character counter.
  std::vector<std::uint64_t> counter(out.alphabet_.size(), 0);
  out.l_rows_.assign(out.alphabet_.size(), {});
  for (std::uint64_t row = 1; row <= n_rows; ++row) {
    const CyclicShift& s = out.shifts_[row - 1];
    const Char c = base[out.begin_[s.string_id] + (s.offset + s.length - 2) % s.length];
    const std::size_t k = slot.at(c);
    out.triples_.push_back({c, row, ++counter[k]});
    out.l_rows_[k].push_back(row);
  }
  return out;
}

Char Ebwt::rotation_char(std::uint64_t row, std::size_t k) const {
  const CyclicShift& s = shifts_[row - 1];
  return text_[begin_[s.string_id] + (s.offset - 1 + k) % s.length];
}

Text Ebwt::rotation_text(std::uint64_t row) const {
  const CyclicShift& s = shifts_[row - 1];
  Text t;
  t.reserve(s.length);
  for (std::size_t k = 0; k < s.length; ++k) t.push_back(rotation_char(row, k));
  return t;
}

const AlphabetEntry* Ebwt::find(Char c) const {
  auto it = std::lower_bound(
      alphabet_.begin(), alphabet_.end(), c,
      [](const AlphabetEntry& e, Char x) { return e.ch < x; });
  if (it == alphabet_.end() || it->ch != c) return nullptr;
  return &*it;
}

std::uint64_t Ebwt::exact_rank(Char c, std::uint64_t i) const {
  const AlphabetEntry* e = find(c);
  if (e == nullptr || i == 0) return 0;
  const auto& rows = l_rows_[e - alphabet_.data()];
  return std::upper_bound(rows.begin(), rows.end(), i) - rows.begin();
}

std::uint64_t Ebwt::occ(Char c) const {
  const AlphabetEntry* e = find(c);
  return e == nullptr ? 0 : e->occ;
}

}  // namespace substrcard
