#pragma once

// Small text helpers shared by the file formats (graph files, configuration
// literals, trace records). All formats are plain ASCII key=value lines.

#include <charconv>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace unison::text {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline uint64_t parse_u64(std::string_view s) {
  uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

// Comma-separated list of non-negative integers; an empty string is the
// empty list.
inline std::vector<uint64_t> parse_u64_list(std::string_view s) {
  std::vector<uint64_t> out;
  if (trim(s).empty()) return out;
  for (auto part : split(s, ',')) out.push_back(parse_u64(trim(part)));
  return out;
}

template <typename Range>
std::string join_u64(const Range& xs) {
  std::string out;
  bool first = true;
  for (auto x : xs) {
    if (!first) out += ',';
    out += std::to_string(static_cast<uint64_t>(x));
    first = false;
  }
  return out;
}

// Splits "key=value" with exactly one '='. Values may be empty.
inline std::pair<std::string_view, std::string_view> split_kv(std::string_view tok) {
  size_t eq = tok.find('=');
  if (eq == std::string_view::npos)
    throw ParseError("expected key=value, got '" + std::string(tok) + "'");
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

// Strips a trailing '#' comment and surrounding whitespace; returns the
// payload (possibly empty).
inline std::string_view strip_comment(std::string_view line) {
  size_t hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  return trim(line);
}

}  // namespace unison::text
