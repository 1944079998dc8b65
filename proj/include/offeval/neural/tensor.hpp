#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "offeval/error.hpp"

namespace offeval::nn {

// Row-major dense matrix. Vectors are stored as [n x 1].
template <typename T>
struct Tensor2 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Tensor2() = default;
  Tensor2(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T(0)) {}

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<T> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const T> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  std::size_t size() const { return data.size(); }
  void zero() { std::fill(data.begin(), data.end(), T(0)); }
  bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

  bool all_finite() const {
    return std::all_of(data.begin(), data.end(), [](T v) { return std::isfinite(v); });
  }

  template <typename U>
  Tensor2<U> cast() const {
    Tensor2<U> out(rows, cols);
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }

  bool operator==(const Tensor2&) const = default;
};

template <typename T>
void require_same_shape(const Tensor2<T>& a, const Tensor2<T>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                     " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  }
}

// y += W x
template <typename T>
void gemv_acc(const Tensor2<T>& W, std::span<const T> x, std::span<T> y) {
  for (std::size_t r = 0; r < W.rows; ++r) {
    const T* w = W.data.data() + r * W.cols;
    T s = T(0);
    for (std::size_t c = 0; c < W.cols; ++c) s += w[c] * x[c];
    y[r] += s;
  }
}

// y += W^T x
template <typename T>
void gemv_t_acc(const Tensor2<T>& W, std::span<const T> x, std::span<T> y) {
  for (std::size_t r = 0; r < W.rows; ++r) {
    const T* w = W.data.data() + r * W.cols;
    const T xr = x[r];
    if (xr == T(0)) continue;
    for (std::size_t c = 0; c < W.cols; ++c) y[c] += w[c] * xr;
  }
}

// G += a b^T
template <typename T>
void outer_acc(std::span<const T> a, std::span<const T> b, Tensor2<T>& G) {
  for (std::size_t r = 0; r < G.rows; ++r) {
    const T ar = a[r];
    if (ar == T(0)) continue;
    T* g = G.data.data() + r * G.cols;
    for (std::size_t c = 0; c < G.cols; ++c) g[c] += ar * b[c];
  }
}

template <typename T>
T sigmoid(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

}  // namespace offeval::nn
