#include "substrcard/string_set.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace substrcard {

Text decode_utf8(std::string_view bytes) {
  Text out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto lead = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    char32_t cp;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    } else {
      throw std::invalid_argument("invalid UTF-8 lead byte at offset " +
                                  std::to_string(i));
    }
    if (i + len > bytes.size())
      throw std::invalid_argument("truncated UTF-8 sequence at offset " +
                                  std::to_string(i));
    for (std::size_t k = 1; k < len; ++k) {
      const auto cont = static_cast<unsigned char>(bytes[i + k]);
      if ((cont & 0xC0) != 0x80)
        throw std::invalid_argument("invalid UTF-8 continuation at offset " +
                                    std::to_string(i + k));
      cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr char32_t kMinForLen[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      throw std::invalid_argument("invalid UTF-8 code point at offset " +
                                  std::to_string(i));
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(TextView text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

void validate_text(TextView s) {
  if (s.empty()) throw std::invalid_argument("empty string in data set");
  for (Char c : s) {
    if (c == kSentinel)
      throw std::invalid_argument("string contains reserved code point 0");
    if (c == U'\n') throw std::invalid_argument("string contains a newline");
  }
}

void validate_pattern(TextView pattern) {
  if (pattern.empty()) throw std::invalid_argument("empty pattern");
  if (pattern.find(kSentinel) != TextView::npos)
    throw std::invalid_argument("pattern contains reserved code point 0");
}

StringSet::StringSet(std::vector<Text> strings) : strings_(std::move(strings)) {
  for (const auto& s : strings_) validate_text(s);
}

StringSet StringSet::read(std::istream& in) {
  std::vector<Text> strings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    try {
      Text t = decode_utf8(line);
      validate_text(t);
      strings.push_back(std::move(t));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " +
                                  e.what());
    }
  }
  StringSet set;
  set.strings_ = std::move(strings);
  return set;
}

StringSet StringSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  try {
    return read(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void StringSet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write dataset " + path.string());
  for (const auto& s : strings_) out << encode_utf8(s) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::size_t StringSet::max_length() const {
  std::size_t m = 0;
  for (const auto& s : strings_) m = std::max(m, s.size());
  return m;
}

std::vector<Char> StringSet::alphabet() const {
  std::vector<Char> chars;
  for (const auto& s : strings_) chars.insert(chars.end(), s.begin(), s.end());
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  return chars;
}

std::uint64_t StringSet::total_rows() const {
  std::uint64_t rows = 0;
  for (const auto& s : strings_) rows += s.size() + 1;
  return rows;
}

void StringSet::push_back(Text s) {
  validate_text(s);
  strings_.push_back(std::move(s));
}

}  // namespace substrcard
