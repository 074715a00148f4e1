// Shared vocabulary types, errors and small text utilities.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iae {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

enum class Polarity { negative = 0, positive = 1 };

inline const char* to_string(Polarity p) {
  return p == Polarity::positive ? "positive" : "negative";
}

inline Polarity opposite(Polarity p) {
  return p == Polarity::positive ? Polarity::negative : Polarity::positive;
}

namespace text {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > b) out.emplace_back(s.substr(b, i - b));
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// Splits a UTF-8 string into code points, each returned as its byte sequence.
/// Invalid lead bytes are passed through as single-byte units.
inline std::vector<std::string> utf8_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0) len = 4;
    else if (c >= 0xE0) len = 3;
    else if (c >= 0xC0) len = 2;
    len = std::min(len, s.size() - i);
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

inline std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

/// Forward maximum matching: each whitespace-delimited chunk is segmented
/// greedily into the longest words accepted by `known`. Characters that start
/// no known word are dropped.
inline std::vector<std::string> max_match(std::string_view s,
                                          const std::function<bool(const std::string&)>& known,
                                          std::size_t max_word_chars) {
  std::vector<std::string> out;
  if (max_word_chars == 0) return out;
  for (const auto& chunk : split_whitespace(s)) {
    if (known(chunk)) {
      out.push_back(chunk);
      continue;
    }
    const auto chars = utf8_chars(chunk);
    std::size_t i = 0;
    while (i < chars.size()) {
      std::size_t best = 0;
      std::string candidate;
      std::string accepted;
      const std::size_t limit = std::min(max_word_chars, chars.size() - i);
      for (std::size_t len = 1; len <= limit; ++len) {
        candidate += chars[i + len - 1];
        if (known(candidate)) {
          best = len;
          accepted = candidate;
        }
      }
      if (best == 0) {
        ++i;
      } else {
        out.push_back(std::move(accepted));
        i += best;
      }
    }
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

/// Lines without their terminators; a trailing newline does not produce an
/// extra empty line.
inline std::vector<std::string> lines(std::string_view content) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < content.size()) {
    auto pos = content.find('\n', start);
    if (pos == std::string_view::npos) pos = content.size();
    std::string_view line = content.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    start = pos + 1;
  }
  return out;
}

}  // namespace text
}  // namespace iae
