#include <gtest/gtest.h>

#include <sstream>

#include "offeval/rng.hpp"
#include "offeval/textprep.hpp"

#ifndef OFFEVAL_DATA_DIR
#define OFFEVAL_DATA_DIR "data"
#endif

using namespace offeval;

namespace {

AbbreviationLexicon lex_of(const std::string& tsv) {
  std::istringstream in(tsv);
  return AbbreviationLexicon::parse(in);
}

AbbreviationLexicon shipped_lexicon() {
  return AbbreviationLexicon::load(std::string(OFFEVAL_DATA_DIR) + "/abbreviations.tsv");
}

// Mix of ASCII, placeholders, punctuation, symbols, emoji, CJK, accented
// capitals and assorted whitespace.
std::string random_text(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "@USER", "URL",  "IDK",  "idk!", "U",      "Lol", "what's", "#MAGA", "!!!",  "...",  "😂",   "❤️",
      "👍🏽",   "€100", "x²",   "ÉCOLE", "straße", "İ",   "汉字",   "a",     "sooooo", "\t",   "\n",   " ",
      "\xc2\xa0", "-", "—",  "\"",   "'",     "<3",  "ur",     "r",     "N0",   "42",   "&amp;", "\xff"};
  std::string out;
  const std::size_t n = rng.uniform_index(14);
  for (std::size_t i = 0; i < n; ++i) {
    out += pieces[rng.uniform_index(pieces.size())];
    if (rng.uniform01() < 0.6) out += ' ';
  }
  return out;
}

}  // namespace

TEST(Clean, AdoptedPipelineExamples) {
  const CleanConfig cfg;
  EXPECT_EQ(clean("@USER You are IDIOTS URL", cfg, {}), "you are idiots");
  EXPECT_EQ(clean("idk what's up!!!", cfg, lex_of("idk\ti do not know\n")), "i do not know whats up");
  EXPECT_EQ(clean("", cfg, {}), "");
}

TEST(Clean, ExpansionSeesThroughCaseAndPunctuation) {
  const auto lex = lex_of("idk\ti do not know\nu\tyou\n");
  EXPECT_EQ(clean("IDK! U?", CleanConfig{}, lex), "i do not know you");
  CleanConfig no_expand;
  no_expand.expand_abbreviations = false;
  EXPECT_EQ(clean("IDK! U?", no_expand, lex), "idk u");
}

TEST(Clean, PlaceholdersOnlyMatchExactTokens) {
  const CleanConfig cfg;
  EXPECT_EQ(clean("@USER @USER hi URL", cfg, {}), "hi");
  EXPECT_EQ(clean("@user URLs", cfg, {}), "user urls");
}

TEST(Clean, UnicodeCategories) {
  const CleanConfig cfg;
  EXPECT_EQ(clean("so ❤️ cute 😂😂 (really) €5 — ok", cfg, {}), "so cute really 5 ok");
  EXPECT_EQ(clean("ÉCOLE Straße", cfg, {}), "école straße");
}

TEST(Clean, OptionalSteps) {
  CleanConfig cfg;
  cfg.remove_hashtags = true;
  EXPECT_EQ(clean("vote #MAGA now", cfg, {}), "vote now");

  CleanConfig keep_symbols;
  keep_symbols.remove_symbols = false;
  keep_symbols.remove_emoji = true;
  EXPECT_EQ(clean("nice 😂 €5", keep_symbols, {}), "nice €5");

  CleanConfig numbers;
  numbers.remove_numbers = true;
  EXPECT_EQ(clean("top 10 list 2019", numbers, {}), "top list");

  CleanConfig stop;
  stop.remove_stopwords = true;
  const StopwordList words = {"the", "is"};
  EXPECT_EQ(clean("The game is ON", stop, {}, words), "game on");
}

TEST(Clean, AllFlagsOffNormalizesWhitespaceOnly) {
  const auto cfg = CleanConfig::all_off();
  EXPECT_EQ(clean("  @USER   Hi!!\t URL\n", cfg, lex_of("hi\thello\n")), "@USER Hi!! URL");
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto text = random_text(rng);
    const auto cleaned = clean(text, cfg, {});
    // Re-tokenizing on whitespace and re-joining is the reference.
    const auto decoded = unicode::decode(text);
    std::string expected, word;
    for (char32_t cp : decoded) {
      if (unicode::is_space(cp)) {
        if (!word.empty()) expected += (expected.empty() ? "" : " ") + word;
        word.clear();
      } else {
        unicode::append_utf8(word, cp);
      }
    }
    if (!word.empty()) expected += (expected.empty() ? "" : " ") + word;
    EXPECT_EQ(cleaned, expected);
  }
}

TEST(Clean, IdempotentOnRandomStrings) {
  const auto lex = shipped_lexicon();
  const CleanConfig cfg;
  Rng rng(17);
  for (int i = 0; i < 2000; ++i) {
    const auto text = random_text(rng);
    const auto once = clean(text, cfg, lex);
    EXPECT_EQ(clean(once, cfg, lex), once) << "input: " << text;
    EXPECT_EQ(clean(text, cfg, lex), once);
  }
}

TEST(Clean, OutputHasNoUppercaseWhenLowercasing) {
  Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    for (char32_t cp : unicode::decode(clean(random_text(rng), CleanConfig{}, shipped_lexicon())))
      EXPECT_FALSE(unicode::is_upper(cp));
  }
}

TEST(Lexicon, ShippedFileIsClosedAndCoversCoreAbbreviations) {
  const auto lex = shipped_lexicon();
  for (const char* key : {"idk", "lol", "omg", "smh", "btw", "imo", "tbh", "u", "r", "ur"})
    EXPECT_NE(lex.find(key), nullptr) << key;
  // No replacement word may itself be a key; otherwise clean is not idempotent.
  for (const auto& [key, words] : lex.entries())
    for (const auto& w : words) EXPECT_EQ(lex.find(w), nullptr) << key << " -> " << w;
}

TEST(Lexicon, RejectsBadEntries) {
  EXPECT_THROW(lex_of("IDK\ti do not know\n"), DataError);
  EXPECT_THROW(lex_of("idk\t   \n"), DataError);
  EXPECT_THROW(lex_of("idk i do not know\n"), DataError);
  EXPECT_EQ(lex_of("# comment\n\nlol\tlaughing out loud\n").size(), 1u);
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("you are sooooo bad"), (TokenList{"you", "are", "sooo", "bad"}));
  EXPECT_EQ(tokenize("a  b"), (TokenList{"a", "b"}));
  EXPECT_EQ(tokenize("aaab bbb"), (TokenList{"aaab", "bbb"}));
  EXPECT_EQ(tokenize("😂😂😂😂😂"), (TokenList{"😂😂😂"}));
  EXPECT_TRUE(tokenize("").empty());
}

TEST(Tokenize, NeverEmitsFourRepeatsOrWhitespace) {
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    std::string text;
    const std::size_t n = rng.uniform_index(40);
    for (std::size_t k = 0; k < n; ++k) text.push_back("aab \t!"[rng.uniform_index(6)]);
    for (const auto& tok : tokenize(text)) {
      ASSERT_FALSE(tok.empty());
      const auto cps = unicode::decode(tok);
      for (std::size_t k = 0; k < cps.size(); ++k) {
        EXPECT_FALSE(unicode::is_space(cps[k]));
        if (k >= 3) {
          EXPECT_FALSE(cps[k] == cps[k - 1] && cps[k] == cps[k - 2] && cps[k] == cps[k - 3]) << tok;
        }
      }
    }
  }
}

TEST(PreprocessCorpus, Elementwise) {
  const std::vector<std::string> none;
  EXPECT_TRUE(preprocess_corpus(none, CleanConfig{}, {}).empty());
  const std::vector<std::string> placeholders = {"@USER URL"};
  const auto out = preprocess_corpus(placeholders, CleanConfig{}, {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].empty());
  const std::vector<std::string> two = {"First ONE", "second"};
  const auto docs = preprocess_corpus(two, CleanConfig{}, {});
  EXPECT_EQ(docs, (std::vector<TokenList>{{"first", "one"}, {"second"}}));
}

TEST(Unicode, DecodeHandlesInvalidBytes) {
  EXPECT_EQ(unicode::decode("a\xffz"), (std::u32string{U'a', unicode::kReplacement, U'z'}));
  EXPECT_EQ(unicode::decode("\xc0\x80"), (std::u32string{unicode::kReplacement, unicode::kReplacement}));
  EXPECT_EQ(unicode::encode(unicode::decode("héllo 😂")), "héllo 😂");
}
