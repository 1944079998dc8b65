// Fixed four-layer classifiers: Input -> Embedding -> {LSTM | BiLSTM |
// Conv+MaxPool} -> Dropout -> Dense.
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "offeval/error.hpp"
#include "offeval/features.hpp"
#include "offeval/neural/layers.hpp"
#include "offeval/neural/optim.hpp"
#include "offeval/rng.hpp"

namespace offeval::nn {

enum class Arch { lstm, bilstm, cnn };

inline std::string_view to_string(Arch a) {
  switch (a) {
    case Arch::lstm: return "lstm";
    case Arch::bilstm: return "bilstm";
    case Arch::cnn: return "cnn";
  }
  return "?";
}

struct NetworkShape {
  Arch arch = Arch::bilstm;
  std::size_t vocab_rows = 2502;  // vocabulary + PAD + UNK
  std::size_t emb_dim = 60;
  std::size_t hidden = 100;
  std::size_t filters = 100;
  std::size_t window = 3;
  std::size_t outputs = 1;  // 1 = single-logit binary head

  std::size_t readout_dim() const {
    switch (arch) {
      case Arch::lstm: return hidden;
      case Arch::bilstm: return 2 * hidden;
      case Arch::cnn: return filters;
    }
    return 0;
  }

  bool operator==(const NetworkShape&) const = default;
};

template <typename T>
struct Network {
  NetworkShape shape;
  EmbeddingParams<T> embedding;
  LstmParams<T> lstm_fwd;
  LstmParams<T> lstm_bwd;
  ConvParams<T> conv;
  DenseParams<T> dense;

  static Network zeros(const NetworkShape& s) {
    if (s.vocab_rows <= kReservedIndices || s.emb_dim == 0 || s.outputs == 0)
      throw ConfigError("network shape has an empty dimension");
    Network n;
    n.shape = s;
    n.embedding.table = Tensor2<T>(s.vocab_rows, s.emb_dim);
    if (s.arch == Arch::lstm || s.arch == Arch::bilstm) {
      if (s.hidden == 0) throw ConfigError("LSTM hidden size must be positive");
      n.lstm_fwd = LstmParams<T>::zeros(s.emb_dim, s.hidden);
    }
    if (s.arch == Arch::bilstm) n.lstm_bwd = LstmParams<T>::zeros(s.emb_dim, s.hidden);
    if (s.arch == Arch::cnn) {
      if (s.filters == 0) throw ConfigError("CNN filter count must be positive");
      n.conv = ConvParams<T>::zeros(s.filters, s.window, s.emb_dim);
    }
    n.dense = DenseParams<T>::zeros(s.readout_dim(), s.outputs);
    return n;
  }

  // Tensors in serialization and initialization order. Unused blocks of the
  // architecture are omitted.
  std::vector<std::pair<std::string, Tensor2<T>*>> named_tensors() {
    std::vector<std::pair<std::string, Tensor2<T>*>> out{{"embedding", &embedding.table}};
    if (shape.arch != Arch::cnn) {
      out.insert(out.end(), {{"lstm_fwd.W", &lstm_fwd.W}, {"lstm_fwd.U", &lstm_fwd.U}, {"lstm_fwd.b", &lstm_fwd.b}});
    }
    if (shape.arch == Arch::bilstm) {
      out.insert(out.end(), {{"lstm_bwd.W", &lstm_bwd.W}, {"lstm_bwd.U", &lstm_bwd.U}, {"lstm_bwd.b", &lstm_bwd.b}});
    }
    if (shape.arch == Arch::cnn) out.insert(out.end(), {{"conv.W", &conv.W}, {"conv.b", &conv.b}});
    out.insert(out.end(), {{"dense.W", &dense.W}, {"dense.b", &dense.b}});
    return out;
  }

  std::vector<std::pair<std::string, const Tensor2<T>*>> named_tensors() const {
    std::vector<std::pair<std::string, const Tensor2<T>*>> out;
    for (auto& [name, t] : const_cast<Network*>(this)->named_tensors()) out.emplace_back(name, t);
    return out;
  }

  // Pairs every tensor with its gradient; the PAD row is frozen.
  std::vector<ParamSlot<T>> slots(Network& grads) {
    auto params = named_tensors();
    auto gs = grads.named_tensors();
    std::vector<ParamSlot<T>> out;
    for (std::size_t i = 0; i < params.size(); ++i) {
      out.push_back({params[i].second, gs[i].second, params[i].first == "embedding" ? std::size_t{1} : 0});
    }
    return out;
  }

  // Weight matrices ~ U(±sqrt(6 / (rows + cols))), drawn row-major in
  // named_tensors() order (embedding rows from 1). Biases are zero except
  // the LSTM forget gate, which starts at 1.
  void init(Rng& rng) {
    for (auto& [name, t] : named_tensors()) {
      t->zero();
      if (name.ends_with(".b")) continue;
      const double bound = std::sqrt(6.0 / static_cast<double>(t->rows + t->cols));
      const std::size_t first = name == "embedding" ? t->cols : 0;
      for (std::size_t i = first; i < t->size(); ++i) t->data[i] = static_cast<T>(rng.uniform(-bound, bound));
    }
    const std::size_t H = shape.hidden;
    if (shape.arch != Arch::cnn) {
      for (std::size_t j = 0; j < H; ++j) lstm_fwd.b.data[kForgetGate * H + j] = T(1);
    }
    if (shape.arch == Arch::bilstm) {
      for (std::size_t j = 0; j < H; ++j) lstm_bwd.b.data[kForgetGate * H + j] = T(1);
    }
  }

  void zero() {
    for (auto& [name, t] : named_tensors()) t->zero();
  }

  template <typename U>
  Network<U> cast() const {
    Network<U> out = Network<U>::zeros(shape);
    auto src = named_tensors();
    auto dst = out.named_tensors();
    for (std::size_t i = 0; i < src.size(); ++i) *dst[i].second = src[i].second->template cast<U>();
    return out;
  }
};

template <typename T>
struct ForwardCache {
  std::vector<std::uint32_t> indices;
  Tensor2<T> embedded;
  LstmCache<T> lstm;
  BiLstmCache<T> bilstm;
  ConvCache<T> conv;
  std::vector<T> features;
  std::vector<T> mask;
  std::vector<T> dropped;
  std::vector<T> logits;
};

// Rows fed to the sequence layer: the unpadded prefix for recurrent nets;
// for the CNN the prefix extended with PAD up to one full window.
inline std::vector<std::uint32_t> active_indices(const EncodedSequence& seq, const NetworkShape& shape) {
  const std::size_t len = std::min(seq.true_length, seq.indices.size());
  std::size_t rows = len;
  if (shape.arch == Arch::cnn) rows = std::max(len, shape.window);
  std::vector<std::uint32_t> idx(rows, kPadIndex);
  std::copy_n(seq.indices.begin(), len, idx.begin());
  return idx;
}

// Returns the output logits. `rng` is only read in train mode with p > 0.
template <typename T>
std::vector<T> network_forward(const Network<T>& net, const EncodedSequence& seq, DropoutMode mode,
                               double dropout_p, Rng* rng, ForwardCache<T>* cache = nullptr) {
  ForwardCache<T> local;
  ForwardCache<T>& c = cache ? *cache : local;
  c.indices = active_indices(seq, net.shape);
  c.embedded = embed_forward<T>(std::span<const std::uint32_t>(c.indices), net.embedding);
  switch (net.shape.arch) {
    case Arch::lstm:
      c.lstm = lstm_forward(c.embedded, net.lstm_fwd, c.indices.size());
      c.features = c.lstm.final_hidden();
      break;
    case Arch::bilstm:
      c.bilstm = bilstm_forward(c.embedded, net.lstm_fwd, net.lstm_bwd, c.indices.size());
      c.features = c.bilstm.output();
      break;
    case Arch::cnn:
      c.conv = conv_pool_forward(c.embedded, net.conv);
      c.features = c.conv.pooled;
      break;
  }
  if (mode == DropoutMode::train && dropout_p > 0.0) {
    if (!rng) throw ConfigError("network_forward: train-mode dropout needs a random source");
    c.dropped = dropout_apply<T>(c.features, dropout_p, mode, *rng, &c.mask);
  } else {
    c.mask.assign(c.features.size(), T(1));
    c.dropped = c.features;
  }
  c.logits = dense_forward<T>(c.dropped, net.dense);
  return c.logits;
}

// Accumulates parameter gradients for one example into `grads`.
template <typename T>
void network_backward(const Network<T>& net, const ForwardCache<T>& c, std::span<const T> d_logits,
                      Network<T>& grads) {
  std::vector<T> d_dropped(c.dropped.size(), T(0));
  dense_backward<T>(c.dropped, d_logits, net.dense, grads.dense, d_dropped);
  std::vector<T> d_features(d_dropped.size());
  for (std::size_t i = 0; i < d_features.size(); ++i) d_features[i] = d_dropped[i] * c.mask[i];
  Tensor2<T> d_embedded(c.embedded.rows, c.embedded.cols);
  switch (net.shape.arch) {
    case Arch::lstm:
      lstm_backward<T>(c.lstm, net.lstm_fwd, d_features, grads.lstm_fwd, d_embedded);
      break;
    case Arch::bilstm:
      bilstm_backward<T>(c.bilstm, net.lstm_fwd, net.lstm_bwd, d_features, grads.lstm_fwd, grads.lstm_bwd,
                         d_embedded);
      break;
    case Arch::cnn:
      conv_pool_backward<T>(c.conv, net.conv, d_features, grads.conv, d_embedded);
      break;
  }
  embed_backward<T>(std::span<const std::uint32_t>(c.indices), d_embedded, grads.embedding.table);
}

}  // namespace offeval::nn
