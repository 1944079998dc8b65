// Vocabulary construction and document featurization: bag-of-words counts,
// TF-IDF weights and padded word-index sequences.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "offeval/error.hpp"
#include "offeval/textprep.hpp"

namespace offeval {

enum class VocabMode { dense_count, sequence };

inline constexpr std::uint32_t kPadIndex = 0;
inline constexpr std::uint32_t kUnkIndex = 1;
inline constexpr std::uint32_t kReservedIndices = 2;

class Vocabulary {
 public:
  Vocabulary() = default;

  // Tokens must already be in rank order. Frequencies may be empty.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> frequencies, VocabMode mode,
             std::size_t max_size)
      : tokens_(std::move(tokens)), freqs_(std::move(frequencies)), mode_(mode), max_size_(max_size) {
    if (tokens_.size() > max_size_) throw ConfigError("vocabulary exceeds its max_size");
    if (!freqs_.empty() && freqs_.size() != tokens_.size())
      throw ShapeError("vocabulary frequency list does not match token list");
    const std::uint32_t offset = mode_ == VocabMode::sequence ? kReservedIndices : 0;
    index_.reserve(tokens_.size());
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!index_.emplace(tokens_[i], static_cast<std::uint32_t>(i) + offset).second)
        throw DataError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }

  VocabMode mode() const { return mode_; }
  std::size_t max_size() const { return max_size_; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::uint64_t>& frequencies() const { return freqs_; }

  // Width of a count vector, or number of embedding rows including PAD/UNK.
  std::size_t dimension() const {
    return mode_ == VocabMode::sequence ? tokens_.size() + kReservedIndices : tokens_.size();
  }

  std::optional<std::uint32_t> index_of(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const Vocabulary& o) const {
    return tokens_ == o.tokens_ && mode_ == o.mode_ && max_size_ == o.max_size_;
  }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> freqs_;
  std::unordered_map<std::string, std::uint32_t> index_;
  VocabMode mode_ = VocabMode::dense_count;
  std::size_t max_size_ = 0;
};

inline constexpr std::size_t kUnlimitedVocab = std::numeric_limits<std::size_t>::max();

// Keeps the max_size most frequent tokens, ties broken by byte order.
inline Vocabulary build_vocabulary(std::span<const TokenList> docs, std::size_t max_size, VocabMode mode) {
  if (max_size < 1) throw ConfigError("build_vocabulary: max_size must be >= 1");
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& doc : docs)
    for (const auto& tok : doc) ++freq[tok];
  if (freq.empty()) throw DataError("build_vocabulary: corpus has no tokens");
  std::vector<std::pair<std::string, std::uint64_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > max_size) ranked.resize(max_size);
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  tokens.reserve(ranked.size());
  counts.reserve(ranked.size());
  for (auto& [tok, n] : ranked) {
    tokens.push_back(std::move(tok));
    counts.push_back(n);
  }
  return Vocabulary(std::move(tokens), std::move(counts), mode, max_size);
}

// Sparse real vector; indices strictly increasing.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const { return entries.empty(); }
  bool operator==(const SparseVector&) const = default;
};

// Token counts (or 0/1 presence when `binary`) over in-vocabulary tokens.
inline SparseVector bow_vectorize(const TokenList& doc, const Vocabulary& v, bool binary = false) {
  if (v.mode() != VocabMode::dense_count) throw ConfigError("bow_vectorize needs a dense_count vocabulary");
  std::vector<std::uint32_t> hits;
  hits.reserve(doc.size());
  for (const auto& tok : doc)
    if (auto idx = v.index_of(tok)) hits.push_back(*idx);
  std::sort(hits.begin(), hits.end());
  SparseVector out{v.dimension(), {}};
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    out.entries.emplace_back(hits[i], binary ? 1.0 : static_cast<double>(j - i));
    i = j;
  }
  return out;
}

struct TfidfModel {
  std::vector<double> idf;
  std::size_t document_count = 0;

  std::size_t dimension() const { return idf.size(); }
};

// Smoothed idf: ln((1 + n) / (1 + df)) + 1.
inline TfidfModel tfidf_fit(std::span<const SparseVector> docs, std::size_t n_docs) {
  if (docs.empty()) throw DataError("tfidf_fit: no documents");
  if (n_docs < 1) throw ConfigError("tfidf_fit: n_docs must be >= 1");
  const std::size_t dim = docs.front().dim;
  std::vector<std::uint64_t> df(dim, 0);
  for (const auto& d : docs) {
    if (d.dim != dim) throw ShapeError("tfidf_fit: documents have different dimensions");
    for (const auto& [idx, count] : d.entries)
      if (count > 0) ++df[idx];
  }
  TfidfModel m;
  m.document_count = n_docs;
  m.idf.resize(dim);
  const double n = static_cast<double>(n_docs);
  for (std::size_t t = 0; t < dim; ++t) m.idf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
  return m;
}

inline TfidfModel tfidf_fit(std::span<const SparseVector> docs) { return tfidf_fit(docs, docs.size()); }

// count * idf, then L2-normalized. A zero vector stays zero.
inline SparseVector tfidf_transform(const SparseVector& doc, const TfidfModel& m) {
  if (doc.dim != m.dimension()) throw ShapeError("tfidf_transform: dimension mismatch");
  SparseVector out{doc.dim, {}};
  out.entries.reserve(doc.entries.size());
  double sq = 0.0;
  for (const auto& [idx, count] : doc.entries) {
    const double w = count * m.idf[idx];
    out.entries.emplace_back(idx, w);
    sq += w * w;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : out.entries) e.second *= inv;
  }
  return out;
}

struct EncodedSequence {
  std::vector<std::uint32_t> indices;
  std::size_t true_length = 0;

  std::size_t size() const { return indices.size(); }
  bool operator==(const EncodedSequence&) const = default;
};

// OOV maps to UNK; longer docs keep their prefix; zeros are appended.
inline EncodedSequence word2idx_encode(const TokenList& doc, const Vocabulary& v, std::size_t max_len) {
  if (v.mode() != VocabMode::sequence) throw ConfigError("word2idx_encode needs a sequence vocabulary");
  if (max_len < 1) throw ConfigError("word2idx_encode: max_len must be >= 1");
  EncodedSequence out;
  out.indices.assign(max_len, kPadIndex);
  out.true_length = std::min(doc.size(), max_len);
  for (std::size_t t = 0; t < out.true_length; ++t) out.indices[t] = v.index_of(doc[t]).value_or(kUnkIndex);
  return out;
}

inline std::size_t corpus_max_len(std::span<const TokenList> docs) {
  if (docs.empty()) throw DataError("corpus_max_len: empty corpus");
  std::size_t best = 0;
  for (const auto& d : docs) best = std::max(best, d.size());
  return best;
}

// `doc_id index:value ...`, one document per line.
inline void dump_sparse(std::ostream& out, std::span<const std::string> ids, std::span<const SparseVector> docs) {
  if (ids.size() != docs.size()) throw ShapeError("dump_sparse: ids and documents differ in length");
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out << ids[i];
    for (const auto& [idx, value] : docs[i].entries) out << ' ' << idx << ':' << value;
    out << '\n';
  }
}

// `rank token frequency`, rank starting at 1.
inline void dump_vocabulary(std::ostream& out, const Vocabulary& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << (i + 1) << ' ' << v.tokens()[i] << ' ' << (v.frequencies().empty() ? 0 : v.frequencies()[i]) << '\n';
  }
}

}  // namespace offeval
