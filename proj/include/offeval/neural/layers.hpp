// Embedding, LSTM, bidirectional LSTM, convolution + max-over-time pooling,
// dense and dropout layers, each with a hand-written backward pass.
//
// Backward functions accumulate (+=) into the parameter gradients they are
// given, so a mini-batch is a sequence of backward calls over zeroed grads.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "offeval/error.hpp"
#include "offeval/features.hpp"
#include "offeval/neural/tensor.hpp"
#include "offeval/rng.hpp"

namespace offeval::nn {

// ---------------------------------------------------------------- embedding

// table is [(vocab + 2) x dim]; row 0 is PAD and stays zero.
template <typename T>
struct EmbeddingParams {
  Tensor2<T> table;

  std::size_t dim() const { return table.cols; }
};

template <typename T>
Tensor2<T> embed_forward(std::span<const std::uint32_t> indices, const EmbeddingParams<T>& p) {
  Tensor2<T> out(indices.size(), p.dim());
  for (std::size_t t = 0; t < indices.size(); ++t) {
    const std::uint32_t idx = indices[t];
    if (idx >= p.table.rows) throw ShapeError("embed_forward: index " + std::to_string(idx) + " out of range");
    if (idx == kPadIndex) continue;
    std::copy_n(p.table.row(idx).begin(), p.dim(), out.row(t).begin());
  }
  return out;
}

template <typename T>
Tensor2<T> embed_forward(const EncodedSequence& seq, const EmbeddingParams<T>& p) {
  return embed_forward<T>(std::span<const std::uint32_t>(seq.indices), p);
}

template <typename T>
void embed_backward(std::span<const std::uint32_t> indices, const Tensor2<T>& d_out, Tensor2<T>& d_table) {
  for (std::size_t t = 0; t < indices.size(); ++t) {
    const std::uint32_t idx = indices[t];
    if (idx == kPadIndex) continue;
    auto dst = d_table.row(idx);
    const auto src = d_out.row(t);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
  }
}

// --------------------------------------------------------------------- LSTM

enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidate = 3 };

// Gate blocks are stacked row-wise in the order input, forget, output,
// candidate: block g occupies rows [g*H, (g+1)*H).
template <typename T>
struct LstmParams {
  Tensor2<T> W;  // [4H x input]
  Tensor2<T> U;  // [4H x H]
  Tensor2<T> b;  // [4H x 1]

  static LstmParams zeros(std::size_t input, std::size_t hidden) {
    return {Tensor2<T>(4 * hidden, input), Tensor2<T>(4 * hidden, hidden), Tensor2<T>(4 * hidden, 1)};
  }
  std::size_t hidden() const { return U.cols; }
  std::size_t input() const { return W.cols; }
};

// Per-step activations in processing order. With `reverse`, step k reads
// input row steps-1-k.
template <typename T>
struct LstmCache {
  std::size_t steps = 0;
  std::size_t hidden = 0;
  bool reverse = false;
  Tensor2<T> x;      // [steps x input], input rows in position order
  Tensor2<T> gates;  // [steps x 4H], post-activation
  Tensor2<T> c;      // [steps x H]
  Tensor2<T> h;      // [steps x H]

  std::size_t position(std::size_t k) const { return reverse ? steps - 1 - k : k; }

  std::vector<T> final_hidden() const {
    if (steps == 0) return std::vector<T>(hidden, T(0));
    const auto last = h.row(steps - 1);
    return {last.begin(), last.end()};
  }
};

// Runs the recurrence over rows [0, true_length) from a zero state;
// padding rows are never read.
template <typename T>
LstmCache<T> lstm_forward(const Tensor2<T>& x, const LstmParams<T>& p, std::size_t true_length,
                          bool reverse = false) {
  const std::size_t H = p.hidden();
  if (x.cols != p.input()) throw ShapeError("lstm_forward: input width does not match W");
  if (true_length > x.rows) throw ShapeError("lstm_forward: true_length exceeds sequence rows");
  LstmCache<T> cache;
  cache.steps = true_length;
  cache.hidden = H;
  cache.reverse = reverse;
  cache.x = Tensor2<T>(true_length, x.cols);
  std::copy_n(x.data.begin(), true_length * x.cols, cache.x.data.begin());
  cache.gates = Tensor2<T>(true_length, 4 * H);
  cache.c = Tensor2<T>(true_length, H);
  cache.h = Tensor2<T>(true_length, H);
  std::vector<T> z(4 * H);
  std::vector<T> h_prev(H, T(0)), c_prev(H, T(0));
  for (std::size_t k = 0; k < true_length; ++k) {
    std::copy(p.b.data.begin(), p.b.data.end(), z.begin());
    gemv_acc<T>(p.W, cache.x.row(cache.position(k)), z);
    gemv_acc<T>(p.U, h_prev, z);
    auto g = cache.gates.row(k);
    auto c = cache.c.row(k);
    auto h = cache.h.row(k);
    for (std::size_t j = 0; j < H; ++j) {
      const T in = sigmoid(z[kInputGate * H + j]);
      const T fg = sigmoid(z[kForgetGate * H + j]);
      const T og = sigmoid(z[kOutputGate * H + j]);
      const T cand = std::tanh(z[kCandidate * H + j]);
      g[kInputGate * H + j] = in;
      g[kForgetGate * H + j] = fg;
      g[kOutputGate * H + j] = og;
      g[kCandidate * H + j] = cand;
      c[j] = fg * c_prev[j] + in * cand;
      h[j] = og * std::tanh(c[j]);
    }
    std::copy(c.begin(), c.end(), c_prev.begin());
    std::copy(h.begin(), h.end(), h_prev.begin());
  }
  return cache;
}

// Backpropagation through time from a gradient on the final hidden state.
// dx must have at least cache.steps rows; rows are accumulated.
template <typename T>
void lstm_backward(const LstmCache<T>& cache, const LstmParams<T>& p, std::span<const T> dh_final,
                   LstmParams<T>& grad, Tensor2<T>& dx) {
  const std::size_t H = cache.hidden;
  if (dh_final.size() != H) throw ShapeError("lstm_backward: gradient width does not match hidden size");
  if (cache.steps == 0) return;
  std::vector<T> dh(dh_final.begin(), dh_final.end());
  std::vector<T> dc(H, T(0));
  std::vector<T> dz(4 * H);
  std::vector<T> zeros(H, T(0));
  std::vector<T> dh_prev(H);
  for (std::size_t k = cache.steps; k-- > 0;) {
    const auto g = cache.gates.row(k);
    const auto c = cache.c.row(k);
    const std::span<const T> c_prev = k > 0 ? cache.c.row(k - 1) : std::span<const T>(zeros);
    const std::span<const T> h_prev = k > 0 ? cache.h.row(k - 1) : std::span<const T>(zeros);
    for (std::size_t j = 0; j < H; ++j) {
      const T in = g[kInputGate * H + j];
      const T fg = g[kForgetGate * H + j];
      const T og = g[kOutputGate * H + j];
      const T cand = g[kCandidate * H + j];
      const T tc = std::tanh(c[j]);
      dc[j] += dh[j] * og * (T(1) - tc * tc);
      dz[kInputGate * H + j] = dc[j] * cand * in * (T(1) - in);
      dz[kForgetGate * H + j] = dc[j] * c_prev[j] * fg * (T(1) - fg);
      dz[kOutputGate * H + j] = dh[j] * tc * og * (T(1) - og);
      dz[kCandidate * H + j] = dc[j] * in * (T(1) - cand * cand);
      dc[j] *= fg;
    }
    const std::size_t pos = cache.position(k);
    outer_acc<T>(dz, cache.x.row(pos), grad.W);
    outer_acc<T>(dz, h_prev, grad.U);
    for (std::size_t r = 0; r < 4 * H; ++r) grad.b.data[r] += dz[r];
    gemv_t_acc<T>(p.W, dz, dx.row(pos));
    std::fill(dh_prev.begin(), dh_prev.end(), T(0));
    gemv_t_acc<T>(p.U, dz, dh_prev);
    dh.swap(dh_prev);
  }
}

template <typename T>
struct BiLstmCache {
  LstmCache<T> forward;
  LstmCache<T> backward;

  // Forward-direction final state followed by backward-direction final state.
  std::vector<T> output() const {
    auto out = forward.final_hidden();
    const auto b = backward.final_hidden();
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }
};

template <typename T>
BiLstmCache<T> bilstm_forward(const Tensor2<T>& x, const LstmParams<T>& p_fwd, const LstmParams<T>& p_bwd,
                              std::size_t true_length) {
  if (p_fwd.hidden() != p_bwd.hidden()) throw ShapeError("bilstm_forward: direction hidden sizes differ");
  return {lstm_forward(x, p_fwd, true_length, false), lstm_forward(x, p_bwd, true_length, true)};
}

template <typename T>
void bilstm_backward(const BiLstmCache<T>& cache, const LstmParams<T>& p_fwd, const LstmParams<T>& p_bwd,
                     std::span<const T> d_out, LstmParams<T>& g_fwd, LstmParams<T>& g_bwd, Tensor2<T>& dx) {
  const std::size_t H = p_fwd.hidden();
  if (d_out.size() != 2 * H) throw ShapeError("bilstm_backward: gradient width must be 2 * hidden");
  lstm_backward(cache.forward, p_fwd, d_out.first(H), g_fwd, dx);
  lstm_backward(cache.backward, p_bwd, d_out.subspan(H), g_bwd, dx);
}

// ------------------------------------------------------- conv + max pooling

template <typename T>
struct ConvParams {
  Tensor2<T> W;  // [filters x window * dim]
  Tensor2<T> b;  // [filters x 1]
  std::size_t window = 3;

  static ConvParams zeros(std::size_t filters, std::size_t window, std::size_t dim) {
    if (window < 1) throw ConfigError("convolution window must be >= 1");
    return {Tensor2<T>(filters, window * dim), Tensor2<T>(filters, 1), window};
  }
  std::size_t filters() const { return W.rows; }
};

template <typename T>
struct ConvCache {
  Tensor2<T> x;
  std::vector<std::size_t> argmax;  // window start of each filter's maximum
  std::vector<T> pooled;            // ReLU(max score)
};

// Valid 1-D convolution over time, ReLU, max over the rows - window + 1
// positions. Ties keep the earliest position.
template <typename T>
ConvCache<T> conv_pool_forward(const Tensor2<T>& x, const ConvParams<T>& p) {
  const std::size_t w = p.window;
  if (x.rows < w) throw ShapeError("conv_pool_forward: sequence shorter than the window");
  if (p.W.cols != w * x.cols) throw ShapeError("conv_pool_forward: filter width does not match input");
  const std::size_t positions = x.rows - w + 1;
  const std::size_t F = p.filters();
  ConvCache<T> cache{x, std::vector<std::size_t>(F, 0), std::vector<T>(F, T(0))};
  std::vector<T> best(F);
  std::vector<T> scores(F);
  for (std::size_t j = 0; j < positions; ++j) {
    std::copy(p.b.data.begin(), p.b.data.end(), scores.begin());
    gemv_acc<T>(p.W, std::span<const T>(x.data.data() + j * x.cols, w * x.cols), scores);
    for (std::size_t f = 0; f < F; ++f) {
      if (j == 0 || scores[f] > best[f]) {
        best[f] = scores[f];
        cache.argmax[f] = j;
      }
    }
  }
  for (std::size_t f = 0; f < F; ++f) cache.pooled[f] = best[f] > T(0) ? best[f] : T(0);
  return cache;
}

// dx must have the shape of the forward input; rows are accumulated.
template <typename T>
void conv_pool_backward(const ConvCache<T>& cache, const ConvParams<T>& p, std::span<const T> d_out,
                        ConvParams<T>& grad, Tensor2<T>& dx) {
  const std::size_t width = p.window * cache.x.cols;
  for (std::size_t f = 0; f < p.filters(); ++f) {
    if (!(cache.pooled[f] > T(0)) || d_out[f] == T(0)) continue;
    const std::size_t j = cache.argmax[f];
    const T* xin = cache.x.data.data() + j * cache.x.cols;
    T* dxin = dx.data.data() + j * dx.cols;
    auto gw = grad.W.row(f);
    const auto w = p.W.row(f);
    for (std::size_t c = 0; c < width; ++c) {
      gw[c] += d_out[f] * xin[c];
      dxin[c] += d_out[f] * w[c];
    }
    grad.b.data[f] += d_out[f];
  }
}

// -------------------------------------------------------------------- dense

template <typename T>
struct DenseParams {
  Tensor2<T> W;  // [out x in]
  Tensor2<T> b;  // [out x 1]

  static DenseParams zeros(std::size_t in, std::size_t out) { return {Tensor2<T>(out, in), Tensor2<T>(out, 1)}; }
};

template <typename T>
std::vector<T> dense_forward(std::span<const T> h, const DenseParams<T>& p) {
  if (h.size() != p.W.cols) throw ShapeError("dense_forward: input width does not match W");
  std::vector<T> out(p.b.data.begin(), p.b.data.end());
  gemv_acc<T>(p.W, h, out);
  return out;
}

template <typename T>
void dense_backward(std::span<const T> h, std::span<const T> d_out, const DenseParams<T>& p, DenseParams<T>& grad,
                    std::span<T> dh) {
  outer_acc<T>(d_out, h, grad.W);
  for (std::size_t r = 0; r < d_out.size(); ++r) grad.b.data[r] += d_out[r];
  gemv_t_acc<T>(p.W, d_out, dh);
}

// ------------------------------------------------------------------ dropout

enum class DropoutMode { train, eval };

// Inverted dropout. The returned mask holds 0 or 1/(1-p) per entry (all
// ones in eval mode); one uniform draw per entry in train mode with p > 0.
template <typename T>
std::vector<T> dropout_mask(std::size_t n, double p, DropoutMode mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout probability must be in [0, 1)");
  std::vector<T> mask(n, T(1));
  if (mode == DropoutMode::eval || p == 0.0) return mask;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
  for (auto& m : mask) m = rng.uniform01() < p ? T(0) : keep_scale;
  return mask;
}

template <typename T>
std::vector<T> dropout_apply(std::span<const T> h, double p, DropoutMode mode, Rng& rng,
                             std::vector<T>* mask_out = nullptr) {
  const auto mask = dropout_mask<T>(h.size(), p, mode, rng);
  std::vector<T> out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] * mask[i];
  if (mask_out) *mask_out = mask;
  return out;
}

template <typename T>
std::vector<T> dropout_apply(std::span<const T> h, double p, DropoutMode mode, std::uint64_t seed) {
  Rng rng(seed);
  return dropout_apply<T>(h, p, mode, rng);
}

}  // namespace offeval::nn
