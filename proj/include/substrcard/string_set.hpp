#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace substrcard {

/// A Unicode code point.
using Char = char32_t;
using Text = std::u32string;
using TextView = std::u32string_view;

/// Terminator appended to every data string. Sorts below every data character.
inline constexpr Char kSentinel = 0;

/// Decodes UTF-8 into code points. Throws std::invalid_argument on malformed
/// input (overlong forms, surrogates, truncated sequences).
Text decode_utf8(std::string_view bytes);
std::string encode_utf8(TextView text);

/// Throws std::invalid_argument if `s` is empty or holds the sentinel or a
/// newline.
void validate_text(TextView s);

/// Throws std::invalid_argument if `pattern` is empty or holds the sentinel.
void validate_pattern(TextView pattern);

/// Ordered collection of data strings. Every string is non-empty and free of
/// the sentinel and of newlines; the set itself may be empty only when built
/// through the default constructor (update buffers use that).
class StringSet {
 public:
  StringSet() = default;
  explicit StringSet(std::vector<Text> strings);

  /// One string per line, UTF-8. A trailing '\r' is stripped. Empty lines are
  /// rejected with their line number.
  static StringSet read(std::istream& in);
  static StringSet load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return strings_.size(); }
  bool empty() const { return strings_.empty(); }
  const Text& operator[](std::size_t i) const { return strings_[i]; }
  const std::vector<Text>& strings() const { return strings_; }
  auto begin() const { return strings_.begin(); }
  auto end() const { return strings_.end(); }

  std::size_t max_length() const;
  /// Sorted distinct code points over all strings.
  std::vector<Char> alphabet() const;
  /// Sum of (|s| + 1) over all strings: the number of BWT rows.
  std::uint64_t total_rows() const;

  void push_back(Text s);

 private:
  std::vector<Text> strings_;
};

}  // namespace substrcard
