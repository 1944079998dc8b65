// SGD and Adam over a list of parameter tensors. L2 regularization enters
// as weight decay λ·p added to the raw gradient.
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "offeval/error.hpp"
#include "offeval/neural/tensor.hpp"

namespace offeval::nn {

// The first `frozen_rows` rows of `param` are never updated (PAD embedding).
template <typename T>
struct ParamSlot {
  Tensor2<T>* param = nullptr;
  const Tensor2<T>* grad = nullptr;
  std::size_t frozen_rows = 0;
};

template <typename T>
void sgd_step(std::span<const ParamSlot<T>> slots, double lr, double l2) {
  for (const auto& s : slots) require_same_shape(*s.param, *s.grad, "sgd_step");
  const T rate = static_cast<T>(lr);
  const T decay = static_cast<T>(l2);
  for (const auto& s : slots) {
    for (std::size_t i = s.frozen_rows * s.param->cols; i < s.param->size(); ++i) {
      T& p = s.param->data[i];
      p -= rate * (s.grad->data[i] + decay * p);
    }
  }
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamState {
  std::vector<Tensor2<T>> m;
  std::vector<Tensor2<T>> v;
  long step = 0;

  void reset(std::span<const ParamSlot<T>> slots) {
    m.clear();
    v.clear();
    for (const auto& s : slots) {
      m.emplace_back(s.param->rows, s.param->cols);
      v.emplace_back(s.param->rows, s.param->cols);
    }
    step = 0;
  }
};

// Bias-corrected Adam. The state is initialized on first use.
template <typename T>
void adam_step(AdamState<T>& state, std::span<const ParamSlot<T>> slots, double lr, double l2,
               const AdamConfig& cfg = {}) {
  for (const auto& s : slots) require_same_shape(*s.param, *s.grad, "adam_step");
  if (state.m.empty()) state.reset(slots);
  if (state.m.size() != slots.size()) throw ShapeError("adam_step: state does not match parameter list");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  const T corr1 = static_cast<T>(1.0 - std::pow(cfg.beta1, t));
  const T corr2 = static_cast<T>(1.0 - std::pow(cfg.beta2, t));
  const T rate = static_cast<T>(lr);
  const T eps = static_cast<T>(cfg.eps);
  const T decay = static_cast<T>(l2);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& s = slots[k];
    auto& m = state.m[k].data;
    auto& v = state.v[k].data;
    for (std::size_t i = s.frozen_rows * s.param->cols; i < s.param->size(); ++i) {
      T& p = s.param->data[i];
      const T g = s.grad->data[i] + decay * p;
      m[i] = b1 * m[i] + (T(1) - b1) * g;
      v[i] = b2 * v[i] + (T(1) - b2) * g * g;
      const T m_hat = m[i] / corr1;
      const T v_hat = v[i] / corr2;
      p -= rate * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

}  // namespace offeval::nn
