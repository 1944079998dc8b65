// Self-contained model files.
//
// A model file is one JSON object (keys sorted, one-space indent):
//   format          "offeval-model"
//   format_version  1
//   config          run configuration snapshot (no paths)
//   preprocess      cleaning flags, abbreviation lexicon, stopwords
//   labels          ordered label set
//   vocabulary      {mode, max_size, tokens, frequencies}
//   features        {kind, binary, max_len, idf?}
//   model           {kind, ...weights}
// Every real-valued array is a string of C99 hex floats ("%a") separated by
// single spaces, which round-trips exactly.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "offeval/pipeline.hpp"

namespace offeval {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "offeval-model";

namespace modelfile {

using nlohmann::json;

template <typename Range>
std::string encode_reals(const Range& values) {
  std::string out;
  char buf[64];
  bool first = true;
  for (auto v : values) {
    std::snprintf(buf, sizeof buf, "%a", static_cast<double>(v));
    if (!first) out.push_back(' ');
    out += buf;
    first = false;
  }
  return out;
}

inline std::vector<double> decode_reals(const std::string& s) {
  std::vector<double> out;
  const char* p = s.c_str();
  while (*p) {
    while (*p == ' ') ++p;
    if (!*p) break;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) throw DataError("model file: malformed real array");
    out.push_back(v);
    p = end;
  }
  return out;
}

template <typename T>
json encode_tensor(const nn::Tensor2<T>& t) {
  return {{"rows", t.rows}, {"cols", t.cols}, {"data", encode_reals(t.data)}};
}

template <typename T>
void decode_tensor(const json& j, nn::Tensor2<T>& t) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  if (rows != t.rows || cols != t.cols) throw DataError("model file: tensor shape does not match network shape");
  const auto values = decode_reals(j.at("data").get<std::string>());
  if (values.size() != rows * cols) throw DataError("model file: tensor has the wrong number of values");
  for (std::size_t i = 0; i < values.size(); ++i) t.data[i] = static_cast<T>(values[i]);
}

inline json encode_clean(const CleanConfig& c) {
  return {{"remove_user_mentions", c.remove_user_mentions},
          {"remove_url_tokens", c.remove_url_tokens},
          {"remove_punctuation", c.remove_punctuation},
          {"remove_symbols", c.remove_symbols},
          {"lowercase", c.lowercase},
          {"expand_abbreviations", c.expand_abbreviations},
          {"remove_emoji", c.remove_emoji},
          {"remove_hashtags", c.remove_hashtags},
          {"remove_numbers", c.remove_numbers},
          {"remove_stopwords", c.remove_stopwords}};
}

inline CleanConfig decode_clean(const json& j) {
  CleanConfig c;
  c.remove_user_mentions = j.at("remove_user_mentions");
  c.remove_url_tokens = j.at("remove_url_tokens");
  c.remove_punctuation = j.at("remove_punctuation");
  c.remove_symbols = j.at("remove_symbols");
  c.lowercase = j.at("lowercase");
  c.expand_abbreviations = j.at("expand_abbreviations");
  c.remove_emoji = j.at("remove_emoji");
  c.remove_hashtags = j.at("remove_hashtags");
  c.remove_numbers = j.at("remove_numbers");
  c.remove_stopwords = j.at("remove_stopwords");
  return c;
}

inline json encode_config(const RunConfig& c) {
  const auto t = c.effective_train();
  const auto f = c.effective_fit();
  return {{"task", std::string(to_string(c.task))},
          {"model", std::string(to_string(c.model))},
          {"features", std::string(to_string(c.features))},
          {"balance", c.balance},
          {"binary_features", c.binary_features},
          {"vocab_union", c.vocab_union},
          {"vocab_size", c.effective_vocab_size()},
          {"split_ratio", encode_reals(std::vector<double>{c.effective_split()})},
          {"seed", c.seed},
          {"fit",
           {{"l2_lambda", encode_reals(std::vector<double>{f.l2_lambda})},
            {"learning_rate", encode_reals(std::vector<double>{f.learning_rate})},
            {"max_epochs", f.max_epochs},
            {"tol", encode_reals(std::vector<double>{f.tol})},
            {"nb_alpha", encode_reals(std::vector<double>{c.nb_alpha})}}},
          {"train",
           {{"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"learning_rate", encode_reals(std::vector<double>{t.learning_rate})},
            {"optimizer", t.optimizer == nn::Optimizer::adam ? "adam" : "sgd"},
            {"l2_lambda", encode_reals(std::vector<double>{t.l2_lambda})},
            {"dropout_p", encode_reals(std::vector<double>{t.dropout_p})},
            {"patience", t.patience ? json(*t.patience) : json(nullptr)},
            {"emb_dim", c.effective_emb_dim()},
            {"hidden", c.hidden},
            {"filters", c.filters},
            {"window", c.window}}}};
}

inline double decode_real(const json& j) {
  const auto v = decode_reals(j.get<std::string>());
  if (v.size() != 1) throw DataError("model file: expected a single real");
  return v[0];
}

inline RunConfig decode_config(const json& j) {
  RunConfig c;
  c.task = parse_task(j.at("task").get<std::string>());
  c.model = parse_model_kind(j.at("model").get<std::string>());
  c.features = parse_feature_kind(j.at("features").get<std::string>());
  c.balance = j.at("balance");
  c.binary_features = j.at("binary_features");
  c.vocab_union = j.at("vocab_union");
  c.vocab_size = j.at("vocab_size");
  c.split_ratio = decode_real(j.at("split_ratio"));
  c.seed = j.at("seed");
  const auto& f = j.at("fit");
  c.fit.l2_lambda = decode_real(f.at("l2_lambda"));
  c.fit.learning_rate = decode_real(f.at("learning_rate"));
  c.fit_lr_set = true;
  c.fit.max_epochs = f.at("max_epochs");
  c.fit.tol = decode_real(f.at("tol"));
  c.nb_alpha = decode_real(f.at("nb_alpha"));
  const auto& t = j.at("train");
  c.train.epochs = t.at("epochs");
  c.epochs_set = true;
  c.train.batch_size = t.at("batch_size");
  c.train.learning_rate = decode_real(t.at("learning_rate"));
  c.train.optimizer = t.at("optimizer") == "adam" ? nn::Optimizer::adam : nn::Optimizer::sgd;
  c.train.l2_lambda = decode_real(t.at("l2_lambda"));
  c.train.dropout_p = decode_real(t.at("dropout_p"));
  if (t.at("patience").is_null()) {
    c.train.patience.reset();
  } else {
    c.train.patience = t.at("patience").get<int>();
  }
  c.emb_dim = t.at("emb_dim");
  c.hidden = t.at("hidden");
  c.filters = t.at("filters");
  c.window = t.at("window");
  return c;
}

inline json encode_model(const Classifier& model) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, LinearModel>) {
          json rows = json::array();
          for (const auto& r : m.weights) rows.push_back(encode_reals(r));
          return {{"kind", m.kind == LinearKind::logistic ? "logistic" : "hinge"},
                  {"n_features", m.n_features},
                  {"weights", rows},
                  {"bias", encode_reals(m.bias)}};
        } else if constexpr (std::is_same_v<M, NaiveBayesModel>) {
          json rows = json::array();
          for (const auto& r : m.log_likelihood) rows.push_back(encode_reals(r));
          return {{"kind", "naive_bayes"},
                  {"alpha", encode_reals(std::vector<double>{m.alpha})},
                  {"log_prior", encode_reals(m.log_prior)},
                  {"log_likelihood", rows}};
        } else {
          const auto& s = m.net.shape;
          json tensors = json::object();
          for (const auto& [name, t] : m.net.named_tensors()) tensors[name] = encode_tensor(*t);
          return {{"kind", "neural"},
                  {"arch", std::string(nn::to_string(s.arch))},
                  {"vocab_rows", s.vocab_rows},
                  {"emb_dim", s.emb_dim},
                  {"hidden", s.hidden},
                  {"filters", s.filters},
                  {"window", s.window},
                  {"outputs", s.outputs},
                  {"max_len", m.max_len},
                  {"tensors", tensors}};
        }
      },
      model);
}

inline nn::Arch parse_arch(const std::string& s) {
  if (s == "lstm") return nn::Arch::lstm;
  if (s == "bilstm") return nn::Arch::bilstm;
  if (s == "cnn") return nn::Arch::cnn;
  throw DataError("model file: unknown architecture '" + s + "'");
}

inline Classifier decode_model(const json& j, const std::vector<std::string>& classes) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "logistic" || kind == "hinge") {
    LinearModel m;
    m.kind = kind == "logistic" ? LinearKind::logistic : LinearKind::hinge;
    m.classes = classes;
    m.n_features = j.at("n_features");
    for (const auto& r : j.at("weights")) {
      m.weights.push_back(decode_reals(r.get<std::string>()));
      if (m.weights.back().size() != m.n_features) throw DataError("model file: weight row has the wrong width");
    }
    m.bias = decode_reals(j.at("bias").get<std::string>());
    if (m.bias.size() != m.weights.size() || m.weights.size() != (classes.size() == 2 ? 1 : classes.size()))
      throw DataError("model file: linear model rows do not match the label set");
    return m;
  }
  if (kind == "naive_bayes") {
    NaiveBayesModel m;
    m.classes = classes;
    m.alpha = decode_real(j.at("alpha"));
    m.log_prior = decode_reals(j.at("log_prior").get<std::string>());
    for (const auto& r : j.at("log_likelihood")) m.log_likelihood.push_back(decode_reals(r.get<std::string>()));
    if (m.log_prior.size() != classes.size() || m.log_likelihood.size() != classes.size())
      throw DataError("model file: naive Bayes tables do not match the label set");
    return m;
  }
  if (kind == "neural") {
    nn::NetworkShape s;
    s.arch = parse_arch(j.at("arch"));
    s.vocab_rows = j.at("vocab_rows");
    s.emb_dim = j.at("emb_dim");
    s.hidden = j.at("hidden");
    s.filters = j.at("filters");
    s.window = j.at("window");
    s.outputs = j.at("outputs");
    nn::NeuralModel m{nn::Network<float>::zeros(s), classes, j.at("max_len")};
    const auto& tensors = j.at("tensors");
    for (auto& [name, t] : m.net.named_tensors()) decode_tensor(tensors.at(name), *t);
    return m;
  }
  throw DataError("model file: unknown model kind '" + kind + "'");
}

}  // namespace modelfile

inline std::string serialize_model(const TrainedPipeline& tp) {
  using modelfile::json;
  json lex = json::object();
  for (const auto& [key, words] : tp.prep.lexicon.entries()) {
    std::string joined;
    for (const auto& w : words) joined += (joined.empty() ? "" : " ") + w;
    lex[key] = joined;
  }
  json vocab = {{"mode", tp.features.vocab.mode() == VocabMode::sequence ? "sequence" : "dense_count"},
                {"max_size", tp.features.vocab.max_size()},
                {"tokens", tp.features.vocab.tokens()},
                {"frequencies", tp.features.vocab.frequencies()}};
  json features = {{"kind", std::string(to_string(tp.features.kind))},
                   {"binary", tp.features.binary},
                   {"max_len", tp.features.max_len}};
  if (tp.features.tfidf) {
    features["idf"] = modelfile::encode_reals(tp.features.tfidf->idf);
    features["document_count"] = tp.features.tfidf->document_count;
  }
  json doc = {{"format", kModelFormatName},
              {"format_version", kModelFormatVersion},
              {"config", modelfile::encode_config(tp.config)},
              {"preprocess",
               {{"clean", modelfile::encode_clean(tp.prep.clean)},
                {"abbreviations", lex},
                {"stopwords", std::vector<std::string>(tp.prep.stopwords.begin(), tp.prep.stopwords.end())}}},
              {"labels", tp.classes},
              {"vocabulary", vocab},
              {"features", features},
              {"model", modelfile::encode_model(tp.model)}};
  return doc.dump(1) + "\n";
}

inline TrainedPipeline deserialize_model(const std::string& text) {
  using modelfile::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kModelFormatName) throw DataError("not an offeval model file");
    const int version = doc.at("format_version");
    if (version != kModelFormatVersion) {
      throw DataError("unsupported model format version " + std::to_string(version) + " (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    }
    TrainedPipeline tp;
    tp.config = modelfile::decode_config(doc.at("config"));
    const auto& pre = doc.at("preprocess");
    tp.prep.clean = modelfile::decode_clean(pre.at("clean"));
    for (const auto& [key, value] : pre.at("abbreviations").items()) {
      std::istringstream line(key + "\t" + value.get<std::string>());
      const auto parsed = AbbreviationLexicon::parse(line);
      for (const auto& [k, words] : parsed.entries()) tp.prep.lexicon.add(k, words);
    }
    for (const auto& w : pre.at("stopwords")) tp.prep.stopwords.insert(w.get<std::string>());
    tp.classes = doc.at("labels").get<std::vector<std::string>>();
    const auto& v = doc.at("vocabulary");
    tp.features.vocab = Vocabulary(v.at("tokens").get<std::vector<std::string>>(),
                                   v.at("frequencies").get<std::vector<std::uint64_t>>(),
                                   v.at("mode") == "sequence" ? VocabMode::sequence : VocabMode::dense_count,
                                   v.at("max_size").get<std::size_t>());
    const auto& f = doc.at("features");
    tp.features.kind = parse_feature_kind(f.at("kind").get<std::string>());
    tp.features.binary = f.at("binary");
    tp.features.max_len = f.at("max_len");
    if (f.contains("idf")) {
      TfidfModel m;
      m.idf = modelfile::decode_reals(f.at("idf").get<std::string>());
      m.document_count = f.at("document_count");
      if (m.idf.size() != tp.features.vocab.dimension()) throw DataError("model file: idf width mismatch");
      tp.features.tfidf = std::move(m);
    }
    tp.model = modelfile::decode_model(doc.at("model"), tp.classes);
    return tp;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const std::filesystem::path& path, const TrainedPipeline& tp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file '" + path.string() + "'");
  out << serialize_model(tp);
}

inline TrainedPipeline load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace offeval
