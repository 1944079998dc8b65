// UTF-8 decoding/encoding and code point classification.
#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offeval/detail/unicode_tables.hpp"

namespace offeval::unicode {

inline constexpr char32_t kReplacement = 0xFFFD;

// Invalid or truncated sequences decode to U+FFFD, one per offending byte.
inline std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  while (i < s.size()) {
    const unsigned char b0 = byte(i);
    int len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = i + len <= s.size();
    for (int k = 1; ok && k < len; ++k) {
      const unsigned char b = byte(i + k);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMinForLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (ok && (cp < kMinForLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) {
      ok = false;
    }
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
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

inline std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

namespace detail {
inline bool in_ranges(std::span<const offeval::detail::CodepointRange> table, char32_t cp) {
  auto it = std::upper_bound(table.begin(), table.end(), cp,
                             [](char32_t c, const auto& r) { return c < r.lo; });
  if (it == table.begin()) return false;
  --it;
  return cp >= it->lo && cp <= it->hi;
}
}  // namespace detail

inline bool is_punctuation(char32_t cp) {
  return detail::in_ranges(offeval::detail::kPunctuation, cp);
}

inline bool is_symbol(char32_t cp) { return detail::in_ranges(offeval::detail::kSymbol, cp); }

inline bool is_decimal_digit(char32_t cp) {
  return detail::in_ranges(offeval::detail::kDecimalDigit, cp);
}

inline bool is_space(char32_t cp) { return detail::in_ranges(offeval::detail::kWhitespace, cp); }

// Emoji presentation glue: variation selectors and the zero width joiner.
inline bool is_emoji_glue(char32_t cp) { return cp == 0xFE0E || cp == 0xFE0F || cp == 0x200D; }

// Symbols (category S*) that live in the emoji-bearing blocks.
inline bool is_emoji(char32_t cp) {
  const bool in_block = (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
                        (cp >= 0x2300 && cp <= 0x23FF) || (cp >= 0x2B00 && cp <= 0x2BFF);
  return in_block && is_symbol(cp);
}

inline char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  const auto& table = offeval::detail::kLowercase;
  auto it = std::lower_bound(std::begin(table), std::end(table), cp,
                             [](const auto& p, char32_t c) { return p.first < c; });
  if (it != std::end(table) && it->first == cp) return it->second;
  return cp;
}

inline bool is_upper(char32_t cp) { return to_lower(cp) != cp; }

}  // namespace offeval::unicode
