#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "offeval/error.hpp"
#include "offeval/neural/tensor.hpp"

namespace offeval::nn {

template <typename T>
struct ScalarLoss {
  T loss;
  T grad;
};

template <typename T>
struct VectorLoss {
  T loss;
  std::vector<T> grad;
};

// max(z, 0) - z*y + log(1 + exp(-|z|)); d/dz = sigmoid(z) - y.
template <typename T>
ScalarLoss<T> loss_bce_logits(T z, int y) {
  if (!std::isfinite(z)) throw DivergenceError("loss_bce_logits: non-finite logit");
  if (y != 0 && y != 1) throw ConfigError("loss_bce_logits: target must be 0 or 1");
  const T t = static_cast<T>(y);
  const T loss = std::max(z, T(0)) - z * t + std::log1p(std::exp(-std::abs(z)));
  return {loss, sigmoid(z) - t};
}

template <typename T>
std::vector<T> softmax(std::span<const T> s) {
  const T mx = *std::max_element(s.begin(), s.end());
  std::vector<T> p(s.size());
  T total = T(0);
  for (std::size_t k = 0; k < s.size(); ++k) total += (p[k] = std::exp(s[k] - mx));
  for (auto& v : p) v /= total;
  return p;
}

// -log softmax(scores)[cls]; gradient softmax - one_hot(cls).
template <typename T>
VectorLoss<T> loss_cross_entropy(std::span<const T> scores, std::size_t cls) {
  if (scores.size() < 2) throw ShapeError("loss_cross_entropy: need at least two scores");
  if (cls >= scores.size()) throw ConfigError("loss_cross_entropy: class index out of range");
  for (T s : scores)
    if (!std::isfinite(s)) throw DivergenceError("loss_cross_entropy: non-finite score");
  const T mx = *std::max_element(scores.begin(), scores.end());
  T total = T(0);
  for (T s : scores) total += std::exp(s - mx);
  const T lse = mx + std::log(total);
  VectorLoss<T> out{lse - scores[cls], std::vector<T>(scores.size())};
  for (std::size_t k = 0; k < scores.size(); ++k) out.grad[k] = std::exp(scores[k] - lse) - (k == cls ? T(1) : T(0));
  return out;
}

// Mean squared error; gradient 2(pred - target)/n.
template <typename T>
VectorLoss<T> loss_mse(std::span<const T> pred, std::span<const T> target) {
  if (pred.size() != target.size() || pred.empty()) throw ShapeError("loss_mse: length mismatch");
  const T n = static_cast<T>(pred.size());
  VectorLoss<T> out{T(0), std::vector<T>(pred.size())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const T d = pred[i] - target[i];
    out.loss += d * d;
    out.grad[i] = T(2) * d / n;
  }
  out.loss /= n;
  return out;
}

}  // namespace offeval::nn
