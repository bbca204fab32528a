#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cdisp {

// Validates UTF-8: rejects truncated sequences, overlong encodings,
// surrogates, and code points above U+10FFFF.
inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      ++i;
      continue;
    }
    int len;
    std::uint32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1Fu;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0Fu;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07u;
    } else {
      return false;
    }
    if (i + static_cast<std::size_t>(len) > n) return false;
    for (int k = 1; k < len; ++k) {
      const auto bk = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((bk & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (bk & 0x3Fu);
    }
    if (len == 2 && cp < 0x80) return false;
    if (len == 3 && cp < 0x800) return false;
    if (len == 4 && cp < 0x10000) return false;
    if (cp >= 0xD800 && cp <= 0xDFFF) return false;
    if (cp > 0x10FFFF) return false;
    i += static_cast<std::size_t>(len);
  }
  return true;
}

// Lowercases ASCII A-Z and the Latin-1 uppercase range U+00C0..U+00DE
// (excluding the multiplication sign). Code points outside those ranges
// pass through unchanged, which covers German orthography.
inline std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    if (b >= 'A' && b <= 'Z') {
      out.push_back(static_cast<char>(b + 0x20));
      ++i;
    } else if (b == 0xC3 && i + 1 < s.size()) {
      auto b1 = static_cast<unsigned char>(s[i + 1]);
      // U+00C0..U+00DE encode as C3 80..C3 9E; lowercase adds 0x20.
      if (b1 >= 0x80 && b1 <= 0x9E && b1 != 0x97) b1 = static_cast<unsigned char>(b1 + 0x20);
      out.push_back(static_cast<char>(b));
      out.push_back(static_cast<char>(b1));
      i += 2;
    } else {
      out.push_back(static_cast<char>(b));
      ++i;
    }
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      fields.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

// Strips one trailing '\r' so CRLF corpora parse like LF ones.
inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace cdisp
