// Linear text classifiers over sparse features: logistic regression,
// multinomial naive Bayes and a hinge-loss classifier trained by SGD.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "offeval/error.hpp"
#include "offeval/features.hpp"
#include "offeval/rng.hpp"

namespace offeval {

struct FitConfig {
  double l2_lambda = 1e-4;
  double learning_rate = 0.1;
  int max_epochs = 500;
  double tol = 1e-6;
  std::uint64_t seed = 0;

  static FitConfig hinge_defaults() {
    FitConfig cfg;
    cfg.learning_rate = 0.01;
    return cfg;
  }
};

enum class LinearKind { logistic, hinge };

// Binary problems keep a single row scoring classes[1] against classes[0];
// K > 2 classes keep one row per class.
struct LinearModel {
  LinearKind kind = LinearKind::logistic;
  std::vector<std::string> classes;
  std::size_t n_features = 0;
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;

  std::size_t rows() const { return weights.size(); }
  bool binary() const { return classes.size() == 2; }

  static LinearModel zeros(LinearKind kind, std::vector<std::string> classes, std::size_t n_features) {
    LinearModel m;
    m.kind = kind;
    const std::size_t rows = classes.size() == 2 ? 1 : classes.size();
    m.classes = std::move(classes);
    m.n_features = n_features;
    m.weights.assign(rows, std::vector<double>(n_features, 0.0));
    m.bias.assign(rows, 0.0);
    return m;
  }

  double weight_norm_sq() const {
    double s = 0.0;
    for (const auto& row : weights)
      for (double w : row) s += w * w;
    return s;
  }
};

namespace detail {

inline double dot(const std::vector<double>& w, const SparseVector& x) {
  double s = 0.0;
  for (const auto& [idx, v] : x.entries) s += w[idx] * v;
  return s;
}

inline void check_dims(std::span<const SparseVector> X, std::size_t dim) {
  for (const auto& x : X)
    if (x.dim != dim) throw ShapeError("feature dimension mismatch");
}

inline void check_training_set(std::span<const SparseVector> X, std::span<const std::size_t> y,
                               const std::vector<std::string>& classes) {
  if (X.size() != y.size()) throw ShapeError("feature and label counts differ");
  if (classes.size() < 2) throw ConfigError("need at least two classes");
  if (X.empty()) throw DataError("empty training set");
  check_dims(X, X.front().dim);
  std::vector<bool> seen(classes.size(), false);
  for (std::size_t label : y) {
    if (label >= classes.size()) throw DataError("label index out of range");
    seen[label] = true;
  }
  if (std::count(seen.begin(), seen.end(), true) < 2) throw DataError("training labels contain a single class");
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline std::vector<double> softmax(std::span<const double> s) {
  const double mx = *std::max_element(s.begin(), s.end());
  std::vector<double> p(s.size());
  double z = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) z += (p[k] = std::exp(s[k] - mx));
  for (double& v : p) v /= z;
  return p;
}

inline std::size_t argmax_first(std::span<const double> s) {
  return static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
}

}  // namespace detail

// Per-class scores; binary models score {0, z}.
inline std::vector<double> linear_scores(const LinearModel& m, const SparseVector& x) {
  if (x.dim != m.n_features) throw ShapeError("linear model: feature dimension mismatch");
  if (m.binary()) return {0.0, detail::dot(m.weights[0], x) + m.bias[0]};
  std::vector<double> s(m.rows());
  for (std::size_t k = 0; k < m.rows(); ++k) s[k] = detail::dot(m.weights[k], x) + m.bias[k];
  return s;
}

// Mean cross-entropy plus (l2/2)·||W||^2; biases are not penalized. When
// `grad` is given it receives the gradient in the model's own layout.
inline double lr_objective(const LinearModel& m, std::span<const SparseVector> X, std::span<const std::size_t> y,
                           double l2, LinearModel* grad = nullptr) {
  const double n = static_cast<double>(X.size());
  if (grad) *grad = LinearModel::zeros(m.kind, m.classes, m.n_features);
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto& x = X[i];
    if (m.binary()) {
      const double z = detail::dot(m.weights[0], x) + m.bias[0];
      const double t = y[i] == 1 ? 1.0 : 0.0;
      loss += std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
      if (grad) {
        const double g = (detail::sigmoid(z) - t) / n;
        for (const auto& [idx, v] : x.entries) grad->weights[0][idx] += g * v;
        grad->bias[0] += g;
      }
    } else {
      std::vector<double> s(m.rows());
      for (std::size_t k = 0; k < m.rows(); ++k) s[k] = detail::dot(m.weights[k], x) + m.bias[k];
      const double mx = *std::max_element(s.begin(), s.end());
      double lse = 0.0;
      for (double v : s) lse += std::exp(v - mx);
      lse = mx + std::log(lse);
      loss += lse - s[y[i]];
      if (grad) {
        for (std::size_t k = 0; k < m.rows(); ++k) {
          const double g = (std::exp(s[k] - lse) - (k == y[i] ? 1.0 : 0.0)) / n;
          for (const auto& [idx, v] : x.entries) grad->weights[k][idx] += g * v;
          grad->bias[k] += g;
        }
      }
    }
  }
  loss /= n;
  loss += 0.5 * l2 * m.weight_norm_sq();
  if (grad) {
    for (std::size_t k = 0; k < m.rows(); ++k)
      for (std::size_t j = 0; j < m.n_features; ++j) grad->weights[k][j] += l2 * m.weights[k][j];
  }
  return loss;
}

// Full-batch gradient descent from zeros. A step that would raise the
// objective is retried at half the step size, so the recorded losses never
// increase. Stops when the improvement drops below cfg.tol.
inline LinearModel lr_fit(std::span<const SparseVector> X, std::span<const std::size_t> y,
                          std::vector<std::string> classes, const FitConfig& cfg,
                          std::vector<double>* loss_trace = nullptr) {
  detail::check_training_set(X, y, classes);
  if (cfg.l2_lambda < 0 || cfg.learning_rate <= 0 || cfg.max_epochs < 1)
    throw ConfigError("lr_fit: invalid FitConfig");
  LinearModel m = LinearModel::zeros(LinearKind::logistic, std::move(classes), X.front().dim);
  LinearModel grad;
  double loss = lr_objective(m, X, y, cfg.l2_lambda, &grad);
  if (loss_trace) loss_trace->assign(1, loss);
  double step = cfg.learning_rate;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    LinearModel next = m;
    double next_loss = loss;
    for (int attempt = 0; attempt < 30; ++attempt) {
      next = m;
      for (std::size_t k = 0; k < m.rows(); ++k) {
        for (std::size_t j = 0; j < m.n_features; ++j) next.weights[k][j] -= step * grad.weights[k][j];
        next.bias[k] -= step * grad.bias[k];
      }
      next_loss = lr_objective(next, X, y, cfg.l2_lambda);
      if (next_loss <= loss) break;
      step *= 0.5;
    }
    if (!std::isfinite(next_loss)) throw DivergenceError("lr_fit: non-finite loss");
    if (next_loss > loss) break;
    const double improvement = loss - next_loss;
    m = std::move(next);
    loss = lr_objective(m, X, y, cfg.l2_lambda, &grad);
    if (loss_trace) loss_trace->push_back(loss);
    if (improvement < cfg.tol) break;
  }
  return m;
}

inline std::vector<double> lr_predict_proba(const LinearModel& m, const SparseVector& x) {
  const auto s = linear_scores(m, x);
  for (double v : s)
    if (!std::isfinite(v)) throw DivergenceError("lr_predict_proba: non-finite score");
  if (m.binary()) {
    const double p = detail::sigmoid(s[1]);
    return {1.0 - p, p};
  }
  return detail::softmax(s);
}

// Highest score wins; ties go to the earlier class.
inline std::size_t linear_predict_index(const LinearModel& m, const SparseVector& x) {
  const auto s = linear_scores(m, x);
  return detail::argmax_first(s);
}

inline const std::string& linear_predict(const LinearModel& m, const SparseVector& x) {
  return m.classes[linear_predict_index(m, x)];
}

// Mean hinge loss of one binary row plus (l2/2)·||w||^2. Targets are ±1.
inline double hinge_objective(std::span<const double> w, double b, std::span<const SparseVector> X,
                              std::span<const int> targets, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double z = b;
    for (const auto& [idx, v] : X[i].entries) z += w[idx] * v;
    loss += std::max(0.0, 1.0 - targets[i] * z);
  }
  double sq = 0.0;
  for (double v : w) sq += v * v;
  return loss / static_cast<double>(X.size()) + 0.5 * l2 * sq;
}

namespace detail {

inline constexpr int kHingeNoImprovementEpochs = 5;

// Per-example SGD on one ±1 problem. The weight vector is stored as
// scale * v so the L2 shrink costs O(1) per example.
inline void hinge_sgd_row(std::vector<double>& w, double& b, std::span<const SparseVector> X,
                          std::span<const int> targets, const FitConfig& cfg) {
  const double lr = cfg.learning_rate;
  const double decay = 1.0 - lr * cfg.l2_lambda;
  if (decay <= 0.0) throw ConfigError("hinge_sgd_fit: learning_rate * l2_lambda must be < 1");
  std::vector<double> v = w;
  double scale = 1.0;
  std::vector<std::size_t> order(X.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(cfg.seed);
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const auto& x = X[i];
      double z = 0.0;
      for (const auto& [idx, val] : x.entries) z += v[idx] * val;
      const double margin = targets[i] * (scale * z + b);
      scale *= decay;
      if (margin < 1.0) {
        const double g = lr * targets[i];
        for (const auto& [idx, val] : x.entries) v[idx] += (g / scale) * val;
        b += g;
      }
      if (scale < 1e-9) {
        for (double& e : v) e *= scale;
        scale = 1.0;
      }
    }
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = scale * v[j];
    const double obj = hinge_objective(w, b, X, targets, cfg.l2_lambda);
    if (!std::isfinite(obj)) throw DivergenceError("hinge_sgd_fit: non-finite loss");
    if (obj > best - cfg.tol) {
      if (++stale >= kHingeNoImprovementEpochs) break;
    } else {
      stale = 0;
    }
    best = std::min(best, obj);
  }
}

}  // namespace detail

// Binary problems train one row on targets ±1 (+1 = classes[1]); more
// classes train one-vs-rest rows. Every row reuses the seeded epoch order.
// Training stops once the epoch objective has not improved on its best by
// cfg.tol for five epochs in a row. `init`, when given, warm-starts the rows.
inline LinearModel hinge_sgd_fit(std::span<const SparseVector> X, std::span<const std::size_t> y,
                                 std::vector<std::string> classes, const FitConfig& cfg,
                                 const LinearModel* init = nullptr) {
  detail::check_training_set(X, y, classes);
  if (cfg.l2_lambda < 0 || cfg.learning_rate <= 0 || cfg.max_epochs < 1)
    throw ConfigError("hinge_sgd_fit: invalid FitConfig");
  LinearModel m = LinearModel::zeros(LinearKind::hinge, std::move(classes), X.front().dim);
  if (init) {
    if (init->rows() != m.rows() || init->n_features != m.n_features)
      throw ShapeError("hinge_sgd_fit: warm start has the wrong shape");
    m.weights = init->weights;
    m.bias = init->bias;
  }
  std::vector<int> targets(X.size());
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const std::size_t positive = m.binary() ? 1 : k;
    for (std::size_t i = 0; i < X.size(); ++i) targets[i] = y[i] == positive ? 1 : -1;
    detail::hinge_sgd_row(m.weights[k], m.bias[k], X, targets, cfg);
  }
  return m;
}

struct NaiveBayesModel {
  std::vector<std::string> classes;
  std::vector<double> log_prior;
  // log_likelihood[class][feature]
  std::vector<std::vector<double>> log_likelihood;
  double alpha = 1.0;

  std::size_t n_features() const { return log_likelihood.empty() ? 0 : log_likelihood.front().size(); }
};

inline NaiveBayesModel nb_fit(std::span<const SparseVector> X, std::span<const std::size_t> y,
                              std::vector<std::string> classes, double alpha = 1.0) {
  if (X.size() != y.size()) throw ShapeError("nb_fit: feature and label counts differ");
  if (X.empty()) throw DataError("nb_fit: empty training set");
  if (!(alpha > 0)) throw ConfigError("nb_fit: alpha must be positive");
  const std::size_t k = classes.size();
  const std::size_t dim = X.front().dim;
  detail::check_dims(X, dim);
  std::vector<std::size_t> docs(k, 0);
  std::vector<std::vector<double>> counts(k, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (y[i] >= k) throw DataError("nb_fit: label index out of range");
    ++docs[y[i]];
    for (const auto& [idx, v] : X[i].entries) {
      if (v < 0) throw DataError("nb_fit: negative count");
      counts[y[i]][idx] += v;
    }
  }
  NaiveBayesModel m;
  m.classes = std::move(classes);
  m.alpha = alpha;
  m.log_prior.resize(k);
  m.log_likelihood.assign(k, std::vector<double>(dim, 0.0));
  const double n = static_cast<double>(X.size());
  for (std::size_t c = 0; c < k; ++c) {
    if (docs[c] == 0) throw DataError("nb_fit: class " + m.classes[c] + " has no documents");
    m.log_prior[c] = std::log(static_cast<double>(docs[c]) / n);
    double total = 0.0;
    for (double v : counts[c]) total += v;
    const double denom = std::log(total + alpha * static_cast<double>(dim));
    for (std::size_t t = 0; t < dim; ++t) m.log_likelihood[c][t] = std::log(counts[c][t] + alpha) - denom;
  }
  return m;
}

// Unnormalized log posterior per class.
inline std::vector<double> nb_joint_log(const NaiveBayesModel& m, const SparseVector& x) {
  if (x.dim != m.n_features()) throw ShapeError("nb_predict: feature dimension mismatch");
  std::vector<double> s = m.log_prior;
  for (std::size_t c = 0; c < s.size(); ++c)
    for (const auto& [idx, v] : x.entries) s[c] += v * m.log_likelihood[c][idx];
  return s;
}

inline std::size_t nb_predict_index(const NaiveBayesModel& m, const SparseVector& x) {
  return detail::argmax_first(nb_joint_log(m, x));
}

inline const std::string& nb_predict(const NaiveBayesModel& m, const SparseVector& x) {
  return m.classes[nb_predict_index(m, x)];
}

}  // namespace offeval
