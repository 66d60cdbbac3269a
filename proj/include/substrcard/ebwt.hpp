#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "substrcard/string_set.hpp"

namespace substrcard {

/// A rotation of one sentinel-terminated data string, kept implicit.
/// `offset` is 1-indexed; `length` counts the sentinel.
struct CyclicShift {
  std::uint32_t string_id = 0;
  std::uint32_t offset = 1;
  std::uint32_t length = 1;

  friend bool operator==(const CyclicShift&, const CyclicShift&) = default;
};

/// One L-array entry: character, 1-indexed row, and the number of occurrences
/// of `ch` in L[1..row].
struct LTriple {
  Char ch = 0;
  std::uint64_t row = 0;
  std::uint64_t rank = 0;

  friend bool operator==(const LTriple&, const LTriple&) = default;
};

/// Per-character F-array summary. `occ` is the first F row holding `ch`.
struct AlphabetEntry {
  Char ch = 0;
  std::uint64_t occ = 0;
  std::uint64_t count = 0;

  friend bool operator==(const AlphabetEntry&, const AlphabetEntry&) = default;
};

/// Orders two rotations given as sentinel-terminated texts and 0-based start
/// offsets. Equivalent to comparing their infinite periodic expansions, which
/// is what "rotate both until one stops being a prefix of the other" computes.
/// Each text holds exactly one sentinel, so a mismatch shows up within
/// |a| + |b| characters unless the two texts are identical. `skip` leading
/// characters are assumed equal.
std::strong_ordering compare_rotations(std::span<const Char> a,
                                       std::size_t a_offset,
                                       std::span<const Char> b,
                                       std::size_t b_offset,
                                       std::size_t skip = 0);

/// Enhanced rotation order over shifts of `data`. Returns equal only for
/// identical rotation texts (duplicate strings); callers break such ties by
/// string id.
std::strong_ordering compare_shifts(const CyclicShift& a, const CyclicShift& b,
                                    const StringSet& data);

/// Extended multi-string BWT: every rotation of every sentinel-terminated
/// string, sorted, with the L-triples and per-row string ids. Immutable.
class Ebwt {
 public:
  /// Throws std::invalid_argument for an empty set or invalid strings.
  static Ebwt build(const StringSet& data);

  std::uint64_t rows() const { return shifts_.size(); }
  std::size_t string_count() const { return begin_.size(); }

  const std::vector<CyclicShift>& sorted_shifts() const { return shifts_; }
  /// Row i lives at index i - 1.
  const std::vector<LTriple>& l_triples() const { return triples_; }
  const std::vector<std::uint32_t>& row_string_ids() const { return row_ids_; }
  const std::vector<Char>& f_chars() const { return f_chars_; }
  const std::vector<AlphabetEntry>& alphabet() const { return alphabet_; }

  Char f_char(std::uint64_t row) const { return f_chars_[row - 1]; }
  Char l_char(std::uint64_t row) const { return triples_[row - 1].ch; }

  /// k-th character (0-based) of the rotation at `row`, wrapping around.
  Char rotation_char(std::uint64_t row, std::size_t k) const;
  Text rotation_text(std::uint64_t row) const;

  /// Occurrences of `c` in L[1..i]; i = 0 yields 0, i past the end clamps.
  std::uint64_t exact_rank(Char c, std::uint64_t i) const;
  /// First F row holding `c`, or 0 when `c` does not occur.
  std::uint64_t occ(Char c) const;

 private:
  const AlphabetEntry* find(Char c) const;

  std::vector<Char> text_;
  std::vector<std::uint64_t> begin_;
  std::vector<CyclicShift> shifts_;
  std::vector<LTriple> triples_;
  std::vector<std::uint32_t> row_ids_;
  std::vector<Char> f_chars_;
  std::vector<AlphabetEntry> alphabet_;
  // Rows where L = alphabet_[k].ch, ascending.
  std::vector<std::vector<std::uint64_t>> l_rows_;
};

inline Ebwt build_ebwt(const StringSet& data) { return Ebwt::build(data); }

inline std::uint64_t exact_rank(const Ebwt& out, Char c, std::uint64_t i) {
  return out.exact_rank(c, i);
}

}  // namespace substrcard
