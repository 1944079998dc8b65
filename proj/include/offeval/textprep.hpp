// Tweet cleaning and tokenization.
//
// clean() works token by token on whitespace-separated input:
//   1. drop the exact placeholder tokens `@USER` and `URL`
//   2. (optional) drop whole hashtags `#...`
//   3. lowercase
//   4. strip punctuation (category P*), symbols (S*, plus emoji glue),
//      optionally emoji and digits; the stripped token is the lexicon key,
//      so `IDK!` still finds `idk`
//   5. expand abbreviations
//   6. (optional) drop stopwords
// and joins the surviving words with single spaces.
#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offeval/error.hpp"
#include "offeval/unicode.hpp"

namespace offeval {

struct CleanConfig {
  bool remove_user_mentions = true;
  bool remove_url_tokens = true;
  bool remove_punctuation = true;
  bool remove_symbols = true;
  bool lowercase = true;
  bool expand_abbreviations = true;
  bool remove_emoji = false;
  bool remove_hashtags = false;
  bool remove_numbers = false;
  bool remove_stopwords = false;

  bool operator==(const CleanConfig&) const = default;

  static CleanConfig all_off() {
    return {false, false, false, false, false, false, false, false, false, false};
  }
};

using TokenList = std::vector<std::string>;

class AbbreviationLexicon {
 public:
  AbbreviationLexicon() = default;

  void add(const std::string& key, const std::vector<std::string>& words) {
    if (key.empty()) throw DataError("abbreviation with empty key");
    for (char32_t cp : unicode::decode(key)) {
      if (unicode::is_space(cp) || unicode::is_upper(cp))
        throw DataError("abbreviation key '" + key + "' must be a lowercase single token");
    }
    if (words.empty()) throw DataError("abbreviation '" + key + "' has an empty replacement");
    entries_[key] = words;
  }

  const std::vector<std::string>* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Parses `key<TAB>replacement words` lines. Blank lines and lines starting
  // with '#' are skipped.
  static AbbreviationLexicon parse(std::istream& in, const std::string& source = "<lexicon>") {
    AbbreviationLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw DataError(source + ":" + std::to_string(line_no) + ": expected key<TAB>replacement");
      std::vector<std::string> words;
      std::string word;
      for (char32_t cp : unicode::decode(std::string_view(line).substr(tab + 1))) {
        if (unicode::is_space(cp)) {
          if (!word.empty()) words.push_back(std::move(word));
          word.clear();
        } else {
          unicode::append_utf8(word, cp);
        }
      }
      if (!word.empty()) words.push_back(std::move(word));
      try {
        lex.add(line.substr(0, tab), words);
      } catch (const DataError& e) {
        throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    return lex;
  }

  static AbbreviationLexicon load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open abbreviation lexicon '" + path.string() + "'");
    return parse(in, path.string());
  }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

using StopwordList = std::set<std::string, std::less<>>;

inline StopwordList load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open stopword list '" + path.string() + "'");
  StopwordList words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') words.insert(line);
  }
  return words;
}

namespace detail {

inline std::vector<std::u32string> split_ws(std::u32string_view text) {
  std::vector<std::u32string> out;
  std::u32string cur;
  for (char32_t cp : text) {
    if (unicode::is_space(cp)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(cp);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool stripped(char32_t cp, const CleanConfig& cfg) {
  if (cfg.remove_punctuation && unicode::is_punctuation(cp)) return true;
  if (cfg.remove_symbols && (unicode::is_symbol(cp) || unicode::is_emoji_glue(cp))) return true;
  if (cfg.remove_emoji && (unicode::is_emoji(cp) || unicode::is_emoji_glue(cp))) return true;
  if (cfg.remove_numbers && unicode::is_decimal_digit(cp)) return true;
  return false;
}

inline std::string normalize_word(std::u32string_view word, const CleanConfig& cfg) {
  std::string out;
  for (char32_t cp : word) {
    if (cfg.lowercase) cp = unicode::to_lower(cp);
    if (!stripped(cp, cfg)) unicode::append_utf8(out, cp);
  }
  return out;
}

}  // namespace detail

inline std::string clean(std::string_view text, const CleanConfig& cfg, const AbbreviationLexicon& lex,
                         const StopwordList& stopwords = {}) {
  static constexpr std::u32string_view kUser = U"@USER";
  static constexpr std::u32string_view kUrl = U"URL";
  std::string out;
  const auto emit = [&](std::string word) {
    if (word.empty()) return;
    if (cfg.remove_stopwords && stopwords.contains(word)) return;
    if (!out.empty()) out.push_back(' ');
    out += word;
  };
  for (const auto& token : detail::split_ws(unicode::decode(text))) {
    if (cfg.remove_user_mentions && token == kUser) continue;
    if (cfg.remove_url_tokens && token == kUrl) continue;
    if (cfg.remove_hashtags && token.front() == U'#') continue;
    std::string word = detail::normalize_word(token, cfg);
    const auto* expansion = cfg.expand_abbreviations ? lex.find(word) : nullptr;
    if (expansion == nullptr) {
      emit(std::move(word));
      continue;
    }
    for (const auto& part : *expansion) {
      for (const auto& piece : detail::split_ws(unicode::decode(part))) emit(detail::normalize_word(piece, cfg));
    }
  }
  return out;
}

inline constexpr std::size_t kMaxRepeat = 3;

// Whitespace split; runs of more than three identical code points collapse
// to three.
inline TokenList tokenize(std::string_view text) {
  TokenList tokens;
  for (const auto& raw : detail::split_ws(unicode::decode(text))) {
    std::u32string collapsed;
    std::size_t run = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      run = (i > 0 && raw[i] == raw[i - 1]) ? run + 1 : 1;
      if (run <= kMaxRepeat) collapsed.push_back(raw[i]);
    }
    tokens.push_back(unicode::encode(collapsed));
  }
  return tokens;
}

inline std::vector<TokenList> preprocess_corpus(std::span<const std::string> texts, const CleanConfig& cfg,
                                                const AbbreviationLexicon& lex,
                                                const StopwordList& stopwords = {}) {
  std::vector<TokenList> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(tokenize(clean(t, cfg, lex, stopwords)));
  return out;
}

}  // namespace offeval
