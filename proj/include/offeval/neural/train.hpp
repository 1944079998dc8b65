// Mini-batch training with early stopping, and prediction.
#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "offeval/error.hpp"
#include "offeval/eval.hpp"
#include "offeval/neural/loss.hpp"
#include "offeval/neural/network.hpp"
#include "offeval/neural/optim.hpp"

namespace offeval::nn {

enum class Optimizer { sgd, adam };

struct TrainConfig {
  int epochs = 7;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::adam;
  AdamConfig adam;
  double l2_lambda = 1e-5;
  double dropout_p = 0.5;
  // Unset means never stop early.
  std::optional<int> patience = 2;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
    if (l2_lambda < 0) throw ConfigError("l2_lambda must be >= 0");
    if (!(dropout_p >= 0 && dropout_p < 1)) throw ConfigError("dropout_p must be in [0, 1)");
    if (patience && *patience < 1) throw ConfigError("patience must be >= 1");
  }
};

// Per-task epoch defaults for the recurrent models.
inline int default_epochs(Arch arch, bool task_a) {
  if (arch == Arch::lstm) return task_a ? 8 : 7;
  if (arch == Arch::bilstm) return task_a ? 7 : 6;
  return 7;
}

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
  double val_acc = 0;
  double val_macro_f1 = 0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 1-based; 0 before any epoch

  bool operator==(const TrainHistory&) const = default;

  void write_csv(std::ostream& out) const {
    out << "epoch,train_loss,val_loss,val_acc,val_macro_f1\n";
    char buf[160];
    for (const auto& e : epochs) {
      std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss, e.val_loss, e.val_acc,
                    e.val_macro_f1);
      out << buf;
    }
  }
};

// Tracks the best validation loss; signals a stop after `patience`
// consecutive epochs without strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::optional<int> patience) : patience_(patience) {}

  struct Verdict {
    bool improved;
    bool stop;
  };

  Verdict observe(double val_loss) {
    ++epoch_;
    if (val_loss < best_loss_) {
      best_loss_ = val_loss;
      best_epoch_ = epoch_;
      stale_ = 0;
      return {true, false};
    }
    ++stale_;
    return {false, patience_ && stale_ >= *patience_};
  }

  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::optional<int> patience_;
  double best_loss_ = std::numeric_limits<double>::infinity();
  int best_epoch_ = 0;
  int epoch_ = 0;
  int stale_ = 0;
};

struct LabeledSequences {
  std::vector<EncodedSequence> seqs;
  std::vector<std::size_t> labels;

  std::size_t size() const { return seqs.size(); }
};

struct Prediction {
  std::size_t index = 0;
  std::vector<double> probabilities;
};

// Binary heads (one logit) pick classes[1] iff sigmoid(z) >= 0.5; wider heads
// take the first maximal softmax entry.
template <typename T>
Prediction predict_logits(std::span<const T> logits) {
  Prediction p;
  if (logits.size() == 1) {
    const double prob = sigmoid(static_cast<double>(logits[0]));
    p.probabilities = {1.0 - prob, prob};
    p.index = prob >= 0.5 ? 1 : 0;
    return p;
  }
  std::vector<double> s(logits.begin(), logits.end());
  p.probabilities = softmax<double>(s);
  p.index = 0;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (s[k] > s[p.index]) p.index = k;
  return p;
}

template <typename T>
ScalarLoss<T> example_loss(std::span<const T> logits, std::size_t label, std::vector<T>& d_logits) {
  if (logits.size() == 1) {
    if (label > 1) throw ConfigError("binary head given a label index > 1");
    const auto l = loss_bce_logits<T>(logits[0], static_cast<int>(label));
    d_logits.assign(1, l.grad);
    return {l.loss, l.grad};
  }
  auto l = loss_cross_entropy<T>(logits, label);
  d_logits = std::move(l.grad);
  return {l.loss, T(0)};
}

struct EvalSummary {
  double loss = 0;
  double accuracy = 0;
  double macro_f1 = 0;
};

template <typename T>
EvalSummary evaluate_network(const Network<T>& net, const LabeledSequences& data,
                             const std::vector<std::string>& classes) {
  EvalSummary s;
  std::vector<std::string> gold, pred;
  std::vector<T> d_logits;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto logits = network_forward<T>(net, data.seqs[i], DropoutMode::eval, 0.0, nullptr);
    s.loss += static_cast<double>(example_loss<T>(logits, data.labels[i], d_logits).loss);
    gold.push_back(classes[data.labels[i]]);
    pred.push_back(classes[predict_logits<T>(logits).index]);
  }
  s.loss /= static_cast<double>(data.size());
  const auto report = evaluate_labels(gold, pred, classes);
  s.accuracy = report.accuracy;
  s.macro_f1 = report.macro_f1;
  return s;
}

template <typename T>
struct TrainResult {
  Network<T> net;
  TrainHistory history;
};

// Draw order on the single seeded generator: parameter initialization, then
// for every epoch the shuffle of the training order followed by dropout
// masks in example order. Batch gradients are means over the batch and are
// accumulated in example order.
template <typename T>
TrainResult<T> train_network(const NetworkShape& shape, const LabeledSequences& train, const LabeledSequences& val,
                             const std::vector<std::string>& classes, const TrainConfig& cfg) {
  cfg.validate();
  if (train.size() == 0 || val.size() == 0) throw DataError("train_network: empty training or validation split");
  if (train.seqs.size() != train.labels.size() || val.seqs.size() != val.labels.size())
    throw ShapeError("train_network: sequence and label counts differ");
  const std::size_t expected_outputs = classes.size() == 2 ? 1 : classes.size();
  if (shape.outputs != expected_outputs) throw ConfigError("train_network: head width does not match label set");

  Rng rng(cfg.seed);
  TrainResult<T> result{Network<T>::zeros(shape), {}};
  Network<T>& net = result.net;
  net.init(rng);
  Network<T> grads = Network<T>::zeros(shape);
  auto slots = net.slots(grads);
  AdamState<T> adam;
  Network<T> best = net;
  EarlyStopping stopper(cfg.patience);

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  ForwardCache<T> cache;
  std::vector<T> d_logits;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const T scale = T(1) / static_cast<T>(end - start);
      grads.zero();
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        const auto logits = network_forward<T>(net, train.seqs[i], DropoutMode::train, cfg.dropout_p, &rng, &cache);
        const T loss = example_loss<T>(logits, train.labels[i], d_logits).loss;
        if (!std::isfinite(loss)) {
          throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) + ", example " +
                                std::to_string(i));
        }
        epoch_loss += static_cast<double>(loss);
        for (auto& g : d_logits) g *= scale;
        network_backward<T>(net, cache, d_logits, grads);
      }
      if (cfg.optimizer == Optimizer::adam) {
        adam_step<T>(adam, slots, cfg.learning_rate, cfg.l2_lambda, cfg.adam);
      } else {
        sgd_step<T>(slots, cfg.learning_rate, cfg.l2_lambda);
      }
    }
    const auto summary = evaluate_network(net, val, classes);
    if (!std::isfinite(summary.loss)) throw DivergenceError("non-finite validation loss at epoch " + std::to_string(epoch));
    result.history.epochs.push_back(
        {epoch, epoch_loss / static_cast<double>(train.size()), summary.loss, summary.accuracy, summary.macro_f1});
    const auto verdict = stopper.observe(summary.loss);
    if (verdict.improved) best = net;
    if (verdict.stop) break;
  }
  result.history.best_epoch = stopper.best_epoch();
  result.net = std::move(best);
  return result;
}

// Trained classifier together with the sequence length it expects.
struct NeuralModel {
  Network<float> net;
  std::vector<std::string> classes;
  std::size_t max_len = 0;
};

inline Prediction neural_predict(const NeuralModel& model, const EncodedSequence& seq) {
  if (seq.size() != model.max_len) throw ShapeError("neural_predict: sequence length does not match the model");
  const auto logits = network_forward<float>(model.net, seq, DropoutMode::eval, 0.0, nullptr);
  return predict_logits<float>(logits);
}

}  // namespace offeval::nn
