#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "offeval/features.hpp"
#include "offeval/rng.hpp"

using namespace offeval;

namespace {

std::vector<TokenList> random_corpus(Rng& rng, std::size_t docs, std::size_t words) {
  std::vector<TokenList> out(docs);
  for (auto& d : out) {
    const std::size_t len = rng.uniform_index(12);
    for (std::size_t i = 0; i < len; ++i) d.push_back("w" + std::to_string(rng.uniform_index(words)));
  }
  return out;
}

}  // namespace

TEST(Vocabulary, RanksByFrequencyThenToken) {
  const std::vector<TokenList> docs = {{"b", "a", "c"}, {"c", "b"}, {"c"}};
  const auto v = build_vocabulary(docs, kUnlimitedVocab, VocabMode::dense_count);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"c", "b", "a"}));
  EXPECT_EQ(v.frequencies(), (std::vector<std::uint64_t>{3, 2, 1}));
  EXPECT_EQ(v.index_of("c"), 0u);

  const std::vector<TokenList> tied = {{"z", "y", "x"}};
  const auto capped = build_vocabulary(tied, 2, VocabMode::dense_count);
  EXPECT_EQ(capped.tokens(), (std::vector<std::string>{"x", "y"}));
  EXPECT_FALSE(capped.index_of("z").has_value());
}

TEST(Vocabulary, SequenceModeReservesPadAndUnk) {
  const std::vector<TokenList> docs = {{"you", "are", "you"}};
  const auto v = build_vocabulary(docs, kUnlimitedVocab, VocabMode::sequence);
  EXPECT_EQ(v.index_of("you"), 2u);
  EXPECT_EQ(v.index_of("are"), 3u);
  EXPECT_EQ(v.dimension(), 4u);
}

TEST(Vocabulary, Errors) {
  const std::vector<TokenList> empty_docs = {{}, {}};
  EXPECT_THROW(build_vocabulary(empty_docs, 10, VocabMode::dense_count), DataError);
  const std::vector<TokenList> docs = {{"a"}};
  EXPECT_THROW(build_vocabulary(docs, 0, VocabMode::dense_count), ConfigError);
}

TEST(Vocabulary, SizeIsMinOfCapAndDistinctTokens) {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto docs = random_corpus(rng, 30, 50);
    std::set<std::string> distinct;
    for (const auto& d : docs) distinct.insert(d.begin(), d.end());
    if (distinct.empty()) continue;
    const std::size_t cap = 1 + rng.uniform_index(60);
    const auto v = build_vocabulary(docs, cap, VocabMode::dense_count);
    EXPECT_EQ(v.size(), std::min(cap, distinct.size()));
    // Frequencies are non-increasing in rank order.
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GE(v.frequencies()[i - 1], v.frequencies()[i]);
  }
}

TEST(Bow, CountsAndBinary) {
  const std::vector<TokenList> docs = {{"a", "b"}, {"a"}};
  const auto v = build_vocabulary(docs, kUnlimitedVocab, VocabMode::dense_count);
  const auto x = bow_vectorize({"b", "a", "b", "zzz"}, v);
  EXPECT_EQ(x.dim, 2u);
  EXPECT_EQ(x.entries, (std::vector<std::pair<std::uint32_t, double>>{{0, 1.0}, {1, 2.0}}));
  const auto bin = bow_vectorize({"b", "a", "b"}, v, true);
  EXPECT_EQ(bin.entries, (std::vector<std::pair<std::uint32_t, double>>{{0, 1.0}, {1, 1.0}}));
  EXPECT_TRUE(bow_vectorize({"zzz"}, v).empty());
}

TEST(Bow, TotalCountEqualsInVocabTokens) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto docs = random_corpus(rng, 20, 30);
    const auto v = build_vocabulary(std::vector<TokenList>{{"w0"}, {"w1", "w2", "w3", "w4"}}, kUnlimitedVocab,
                                    VocabMode::dense_count);
    for (const auto& d : docs) {
      double total = 0;
      std::size_t expected = 0;
      for (const auto& [_, c] : bow_vectorize(d, v).entries) total += c;
      for (const auto& t : d) expected += v.index_of(t).has_value();
      EXPECT_EQ(total, static_cast<double>(expected));
    }
  }
}

TEST(Tfidf, FrozenSmoothedValues) {
  const std::vector<TokenList> docs = {{"a", "b"}, {"a"}};
  const auto v = build_vocabulary(docs, kUnlimitedVocab, VocabMode::dense_count);
  std::vector<SparseVector> counts;
  for (const auto& d : docs) counts.push_back(bow_vectorize(d, v));
  const auto m = tfidf_fit(counts);
  EXPECT_DOUBLE_EQ(m.idf[0], 1.0);
  EXPECT_NEAR(m.idf[1], 1.4054651081081644, 1e-15);
  const auto x = tfidf_transform(counts[0], m);
  EXPECT_NEAR(x.entries[0].second, 0.5797386715376657, 1e-15);
  EXPECT_NEAR(x.entries[1].second, 0.8148024746671689, 1e-15);
}

TEST(Tfidf, RowsAreUnitOrZero) {
  Rng rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const auto docs = random_corpus(rng, 25, 40);
    std::vector<TokenList> nonempty;
    for (const auto& d : docs)
      if (!d.empty()) nonempty.push_back(d);
    if (nonempty.empty()) continue;
    const auto v = build_vocabulary(nonempty, 15, VocabMode::dense_count);
    std::vector<SparseVector> counts;
    for (const auto& d : docs) counts.push_back(bow_vectorize(d, v));
    const auto m = tfidf_fit(counts);
    for (double idf : m.idf) EXPECT_GE(idf, 1.0);
    for (const auto& c : counts) {
      double sq = 0;
      for (const auto& [_, w] : tfidf_transform(c, m).entries) sq += w * w;
      if (c.empty())
        EXPECT_EQ(sq, 0.0);
      else
        EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-12);
    }
  }
}

TEST(Tfidf, Errors) {
  EXPECT_THROW(tfidf_fit(std::vector<SparseVector>{}), DataError);
  const std::vector<SparseVector> docs = {{2, {}}};
  EXPECT_THROW(tfidf_fit(docs, 0), ConfigError);
  const auto m = tfidf_fit(docs);
  EXPECT_THROW(tfidf_transform(SparseVector{3, {}}, m), ShapeError);
}

TEST(Word2Idx, PadsTruncatesAndMapsUnknown) {
  const std::vector<TokenList> docs = {{"you", "are"}};
  const auto v = build_vocabulary(docs, kUnlimitedVocab, VocabMode::sequence);
  // Equal frequencies rank alphabetically: are=2, you=3.
  const auto a = word2idx_encode({"you", "are", "dumb"}, v, 5);
  EXPECT_EQ(a.indices, (std::vector<std::uint32_t>{3, 2, 1, 0, 0}));
  EXPECT_EQ(a.true_length, 3u);
  const auto b = word2idx_encode({"you", "are", "you", "are"}, v, 2);
  EXPECT_EQ(b.indices, (std::vector<std::uint32_t>{3, 2}));
  EXPECT_EQ(b.true_length, 2u);
  const auto c = word2idx_encode({}, v, 3);
  EXPECT_EQ(c.indices, (std::vector<std::uint32_t>{0, 0, 0}));
  EXPECT_EQ(c.true_length, 0u);
  EXPECT_THROW(word2idx_encode({"a"}, v, 0), ConfigError);
  const auto dense = build_vocabulary(docs, kUnlimitedVocab, VocabMode::dense_count);
  EXPECT_THROW(word2idx_encode({"a"}, dense, 3), ConfigError);
}

TEST(Word2Idx, ShapeAndPaddingInvariant) {
  Rng rng(21);
  const auto docs = random_corpus(rng, 40, 30);
  const auto v = build_vocabulary(docs, 10, VocabMode::sequence);
  for (const auto& d : docs) {
    const std::size_t max_len = 1 + rng.uniform_index(15);
    const auto e = word2idx_encode(d, v, max_len);
    ASSERT_EQ(e.size(), max_len);
    EXPECT_EQ(e.true_length, std::min(d.size(), max_len));
    for (std::size_t t = 0; t < max_len; ++t) {
      if (t < e.true_length) {
        EXPECT_NE(e.indices[t], kPadIndex);
        EXPECT_LT(e.indices[t], v.dimension());
      } else {
        EXPECT_EQ(e.indices[t], kPadIndex);
      }
    }
  }
}

TEST(Dump, SparseAndVocabularyFormats) {
  const std::vector<TokenList> docs = {{"a", "b", "b"}};
  const auto v = build_vocabulary(docs, kUnlimitedVocab, VocabMode::dense_count);
  std::ostringstream out;
  const std::vector<std::string> ids = {"d1"};
  const std::vector<SparseVector> x = {bow_vectorize(docs[0], v)};
  dump_sparse(out, ids, x);
  EXPECT_EQ(out.str(), "d1 0:2 1:1\n");
  std::ostringstream vocab;
  dump_vocabulary(vocab, v);
  EXPECT_EQ(vocab.str(), "1 b 2\n2 a 1\n");
}
