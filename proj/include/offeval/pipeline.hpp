// End-to-end training and prediction: task view -> split -> random draw ->
// clean/tokenize -> features -> classifier.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "offeval/corpus.hpp"
#include "offeval/error.hpp"
#include "offeval/eval.hpp"
#include "offeval/features.hpp"
#include "offeval/linear.hpp"
#include "offeval/neural/train.hpp"
#include "offeval/textprep.hpp"

namespace offeval {

enum class ModelKind { lr, nb, sgd, lstm, bilstm, cnn };
enum class FeatureKind { bow, tfidf, seq };

inline std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::lr: return "lr";
    case ModelKind::nb: return "nb";
    case ModelKind::sgd: return "sgd";
    case ModelKind::lstm: return "lstm";
    case ModelKind::bilstm: return "bilstm";
    case ModelKind::cnn: return "cnn";
  }
  return "?";
}

inline std::string_view to_string(FeatureKind f) {
  switch (f) {
    case FeatureKind::bow: return "bow";
    case FeatureKind::tfidf: return "tfidf";
    case FeatureKind::seq: return "seq";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  for (auto m : {ModelKind::lr, ModelKind::nb, ModelKind::sgd, ModelKind::lstm, ModelKind::bilstm, ModelKind::cnn})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown model '" + std::string(s) + "'");
}

inline FeatureKind parse_feature_kind(std::string_view s) {
  for (auto f : {FeatureKind::bow, FeatureKind::tfidf, FeatureKind::seq})
    if (to_string(f) == s) return f;
  throw ConfigError("unknown feature type '" + std::string(s) + "'");
}

inline bool is_neural(ModelKind m) { return m == ModelKind::lstm || m == ModelKind::bilstm || m == ModelKind::cnn; }

inline nn::Arch arch_of(ModelKind m) {
  switch (m) {
    case ModelKind::lstm: return nn::Arch::lstm;
    case ModelKind::bilstm: return nn::Arch::bilstm;
    case ModelKind::cnn: return nn::Arch::cnn;
    default: throw ConfigError("not a neural model: " + std::string(to_string(m)));
  }
}

// Zero in a size field means "use the documented default".
struct RunConfig {
  Task task = Task::A;
  ModelKind model = ModelKind::lr;
  FeatureKind features = FeatureKind::bow;
  bool balance = false;
  bool binary_features = false;
  bool vocab_union = false;
  CleanConfig clean;

  FitConfig fit;           // lr / sgd
  bool fit_lr_set = false;  // false: model default (0.1 lr, 0.01 sgd)
  double nb_alpha = 1.0;

  nn::TrainConfig train;
  bool epochs_set = false;  // false: per-task default
  std::size_t emb_dim = 0;  // 60 recurrent, 100 cnn
  std::size_t hidden = 100;
  std::size_t filters = 100;
  std::size_t window = 3;

  std::size_t vocab_size = 0;  // 2500 for sequences, unlimited for counts
  std::size_t max_len = 0;     // longest training tweet
  double split_ratio = 0.0;    // 0.9 for neural models, no holdout for linear ones
  std::uint64_t seed = 0;

  void validate() const {
    if (is_neural(model) && features != FeatureKind::seq)
      throw ConfigError("model " + std::string(to_string(model)) + " requires --features seq");
    if (!is_neural(model) && features == FeatureKind::seq)
      throw ConfigError("model " + std::string(to_string(model)) + " requires --features bow or tfidf");
    if (model == ModelKind::nb && features == FeatureKind::tfidf)
      throw ConfigError("model nb requires count features (--features bow)");
    if (split_ratio < 0.0 || split_ratio >= 1.0) throw ConfigError("split ratio must be in (0, 1)");
    if (!(nb_alpha > 0)) throw ConfigError("nb alpha must be positive");
    if (is_neural(model)) train.validate();
  }

  std::size_t effective_vocab_size() const {
    if (vocab_size) return vocab_size;
    return features == FeatureKind::seq ? 2500 : kUnlimitedVocab;
  }
  std::size_t effective_emb_dim() const {
    if (emb_dim) return emb_dim;
    return model == ModelKind::cnn ? 100 : 60;
  }
  double effective_split() const {
    if (split_ratio > 0.0) return split_ratio;
    return is_neural(model) ? 0.9 : 0.0;
  }
  nn::TrainConfig effective_train() const {
    nn::TrainConfig t = train;
    t.seed = seed;
    if (!epochs_set && (model == ModelKind::lstm || model == ModelKind::bilstm)) t.epochs = nn::default_epochs(arch_of(model), task == Task::A);
    return t;
  }
  FitConfig effective_fit() const {
    FitConfig f = fit;
    f.seed = seed;
    if (!fit_lr_set) f.learning_rate = model == ModelKind::sgd ? 0.01 : 0.1;
    return f;
  }
};

struct Preprocessor {
  CleanConfig clean;
  AbbreviationLexicon lexicon;
  StopwordList stopwords;

  std::vector<TokenList> run(std::span<const std::string> texts) const {
    return preprocess_corpus(texts, clean, lexicon, stopwords);
  }
};

struct FeatureState {
  FeatureKind kind = FeatureKind::bow;
  Vocabulary vocab;
  std::optional<TfidfModel> tfidf;
  bool binary = false;
  std::size_t max_len = 0;

  SparseVector sparse(const TokenList& doc) const {
    auto counts = bow_vectorize(doc, vocab, binary);
    return tfidf ? tfidf_transform(counts, *tfidf) : counts;
  }
  EncodedSequence sequence(const TokenList& doc) const { return word2idx_encode(doc, vocab, max_len); }
};

using Classifier = std::variant<LinearModel, NaiveBayesModel, nn::NeuralModel>;

struct TrainedPipeline {
  RunConfig config;
  Preprocessor prep;
  FeatureState features;
  std::vector<std::string> classes;
  Classifier model;

  std::vector<std::string> predict(std::span<const std::string> texts) const {
    const auto docs = prep.run(texts);
    std::vector<std::string> out;
    out.reserve(docs.size());
    for (const auto& doc : docs) {
      std::visit(
          [&](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, LinearModel>) {
              out.push_back(linear_predict(m, features.sparse(doc)));
            } else if constexpr (std::is_same_v<M, NaiveBayesModel>) {
              out.push_back(nb_predict(m, features.sparse(doc)));
            } else {
              out.push_back(m.classes[nn::neural_predict(m, features.sequence(doc)).index]);
            }
          },
          model);
    }
    return out;
  }
};

struct TrainOutcome {
  TrainedPipeline pipeline;
  std::optional<MetricsReport> holdout;
  std::optional<nn::TrainHistory> history;
  std::size_t train_examples = 0;
};

namespace detail {

inline std::vector<std::string> texts_of(const TaskView& v) {
  std::vector<std::string> t;
  t.reserve(v.size());
  for (const auto& p : v.pairs) t.push_back(p.text);
  return t;
}

inline std::vector<std::string> labels_of(const TaskView& v) {
  std::vector<std::string> t;
  t.reserve(v.size());
  for (const auto& p : v.pairs) t.push_back(p.label);
  return t;
}

inline std::vector<std::size_t> label_indices(const TaskView& v, const std::vector<std::string>& classes) {
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (const auto& p : v.pairs) {
    const auto it = std::find(classes.begin(), classes.end(), p.label);
    if (it == classes.end()) throw DataError("label '" + p.label + "' not in task label set");
    out.push_back(static_cast<std::size_t>(it - classes.begin()));
  }
  return out;
}

}  // namespace detail

// Holdout selection: an explicit validation dataset wins; otherwise the
// task view is split with effective_split() when that is nonzero. Random
// draw balancing touches only the part used for fitting.
inline TrainOutcome train_pipeline(const RunConfig& cfg, const Preprocessor& prep, const Dataset& train_data,
                                   const Dataset* val_data = nullptr,
                                   std::span<const std::string> union_texts = {}) {
  cfg.validate();
  const auto classes = task_labels(cfg.task);
  TaskView fit_view = task_view(train_data, cfg.task);
  if (fit_view.pairs.empty()) throw DataError("no training examples for task " + std::string(to_string(cfg.task)));
  std::optional<TaskView> holdout;
  if (val_data) {
    holdout = task_view(*val_data, cfg.task);
    if (holdout->pairs.empty()) holdout.reset();
  } else if (cfg.effective_split() > 0.0) {
    auto parts = split_view(fit_view, cfg.effective_split(), cfg.seed);
    fit_view = std::move(parts.first);
    holdout = std::move(parts.second);
    if (holdout->pairs.empty()) holdout.reset();
  }
  if (is_neural(cfg.model) && !holdout) throw ConfigError("neural models need a validation split");
  if (cfg.balance) fit_view = random_draw_balance(fit_view, cfg.seed);

  TrainOutcome outcome{{cfg, prep, {}, classes, LinearModel{}}, std::nullopt, std::nullopt, fit_view.size()};
  TrainedPipeline& tp = outcome.pipeline;
  const auto fit_docs = prep.run(detail::texts_of(fit_view));
  const auto fit_labels = detail::label_indices(fit_view, classes);

  std::vector<TokenList> vocab_docs = fit_docs;
  if (cfg.vocab_union) {
    const auto extra = prep.run(union_texts);
    vocab_docs.insert(vocab_docs.end(), extra.begin(), extra.end());
  }
  const VocabMode mode = cfg.features == FeatureKind::seq ? VocabMode::sequence : VocabMode::dense_count;
  tp.features.kind = cfg.features;
  tp.features.binary = cfg.binary_features;
  tp.features.vocab = build_vocabulary(vocab_docs, cfg.effective_vocab_size(), mode);

  std::optional<std::vector<TokenList>> holdout_docs;
  if (holdout) holdout_docs = prep.run(detail::texts_of(*holdout));

  if (cfg.features == FeatureKind::seq) {
    tp.features.max_len = cfg.max_len ? cfg.max_len : std::max<std::size_t>(1, corpus_max_len(fit_docs));
    nn::LabeledSequences train_set, val_set;
    for (std::size_t i = 0; i < fit_docs.size(); ++i) {
      train_set.seqs.push_back(tp.features.sequence(fit_docs[i]));
      train_set.labels.push_back(fit_labels[i]);
    }
    const auto val_labels = detail::label_indices(*holdout, classes);
    for (std::size_t i = 0; i < holdout_docs->size(); ++i) {
      val_set.seqs.push_back(tp.features.sequence((*holdout_docs)[i]));
      val_set.labels.push_back(val_labels[i]);
    }
    nn::NetworkShape shape;
    shape.arch = arch_of(cfg.model);
    shape.vocab_rows = tp.features.vocab.dimension();
    shape.emb_dim = cfg.effective_emb_dim();
    shape.hidden = cfg.hidden;
    shape.filters = cfg.filters;
    shape.window = cfg.window;
    shape.outputs = classes.size() == 2 ? 1 : classes.size();
    auto result = nn::train_network<float>(shape, train_set, val_set, classes, cfg.effective_train());
    tp.model = nn::NeuralModel{std::move(result.net), classes, tp.features.max_len};
    outcome.history = std::move(result.history);
  } else {
    std::vector<SparseVector> counts;
    counts.reserve(fit_docs.size());
    for (const auto& d : fit_docs) counts.push_back(bow_vectorize(d, tp.features.vocab, cfg.binary_features));
    if (cfg.features == FeatureKind::tfidf) {
      tp.features.tfidf = tfidf_fit(counts);
      for (auto& c : counts) c = tfidf_transform(c, *tp.features.tfidf);
    }
    switch (cfg.model) {
      case ModelKind::lr: tp.model = lr_fit(counts, fit_labels, classes, cfg.effective_fit()); break;
      case ModelKind::sgd: tp.model = hinge_sgd_fit(counts, fit_labels, classes, cfg.effective_fit()); break;
      case ModelKind::nb: tp.model = nb_fit(counts, fit_labels, classes, cfg.nb_alpha); break;
      default: throw ConfigError("unreachable model kind");
    }
  }

  if (holdout) {
    const auto pred = tp.predict(detail::texts_of(*holdout));
    outcome.holdout = evaluate_labels(detail::labels_of(*holdout), pred, classes);
  }
  return outcome;
}

// Joins predictions and gold labels on id. Both files must cover the same
// ids. When `classes` is empty the label set is inferred: the first task
// whose label set covers every label, else the sorted union.
inline MetricsReport evaluate_predictions(std::span<const std::pair<std::string, std::string>> pred,
                                          std::span<const std::pair<std::string, std::string>> gold,
                                          std::vector<std::string> classes = {}) {
  std::map<std::string, std::string> pred_by_id(pred.begin(), pred.end());
  if (pred_by_id.size() != pred.size()) throw DataError("duplicate ids in predictions");
  if (pred.size() != gold.size()) throw DataError("prediction and gold files cover different ids");
  std::vector<std::string> g, p;
  for (const auto& [id, label] : gold) {
    const auto it = pred_by_id.find(id);
    if (it == pred_by_id.end()) throw DataError("id " + id + " missing from predictions");
    g.push_back(label);
    p.push_back(it->second);
  }
  if (classes.empty()) {
    std::set<std::string> seen(g.begin(), g.end());
    seen.insert(p.begin(), p.end());
    for (Task t : {Task::A, Task::B, Task::C}) {
      const auto labels = task_labels(t);
      if (std::all_of(seen.begin(), seen.end(),
                      [&](const auto& l) { return std::find(labels.begin(), labels.end(), l) != labels.end(); })) {
        classes = labels;
        break;
      }
    }
    if (classes.empty()) classes.assign(seen.begin(), seen.end());
  }
  return evaluate_labels(g, p, classes);
}

}  // namespace offeval
