// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
// Criteria 1-4 and 9 need the OLID release in $OLID_DIR:
//   olid-training-v1.0.tsv, testset-level{a,b,c}.tsv, labels-level{a,b,c}.csv
// Without it they are skipped. Criterion 9 is reported but never fails the run.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "offeval/modelfile.hpp"
#include "offeval/pipeline.hpp"
#include "support/gradcheck.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
namespace ts = offeval::testing;
using namespace offeval;
using namespace offeval::nn;

namespace {

enum class Verdict { pass, fail, skip };

struct Line {
  int id;
  Verdict verdict;
  std::string detail;
  bool blocking = true;
};

std::vector<Line> g_lines;

void report(int id, Verdict v, const std::string& detail, bool blocking = true) {
  static const char* names[] = {"PASS", "FAIL", "SKIP"};
  std::printf("%s  criterion %d%s: %s\n", names[static_cast<int>(v)], id, blocking ? "" : " (non-blocking)",
              detail.c_str());
  std::fflush(stdout);
  g_lines.push_back({id, v, detail, blocking});
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Preprocessor default_prep() {
  Preprocessor p;
  p.lexicon = AbbreviationLexicon::load(fs::path(OFFEVAL_DATA_DIR) / "abbreviations.tsv");
  return p;
}

// ------------------------------------------------------------------ OLID data

struct Olid {
  Dataset train;
  std::map<Task, std::vector<TweetRow>> test;
  std::map<Task, std::vector<std::pair<std::string, std::string>>> gold;
};

std::optional<Olid> load_olid() {
  const char* env = std::getenv("OLID_DIR");
  if (!env || !*env) return std::nullopt;
  const fs::path dir(env);
  const std::map<Task, std::string> suffix = {{Task::A, "a"}, {Task::B, "b"}, {Task::C, "c"}};
  if (!fs::exists(dir / "olid-training-v1.0.tsv")) return std::nullopt;
  for (const auto& [t, s] : suffix) {
    if (!fs::exists(dir / ("testset-level" + s + ".tsv")) || !fs::exists(dir / ("labels-level" + s + ".csv")))
      return std::nullopt;
  }
  Olid o;
  o.train = load_olid_tsv(dir / "olid-training-v1.0.tsv");
  for (const auto& [t, s] : suffix) {
    o.test[t] = load_tweets_tsv(dir / ("testset-level" + s + ".tsv"));
    o.gold[t] = load_label_csv(dir / ("labels-level" + s + ".csv"));
  }
  return o;
}

double test_macro_f1(const TrainedPipeline& tp, const Olid& o, Task t) {
  std::vector<std::string> texts;
  for (const auto& r : o.test.at(t)) texts.push_back(r.text);
  const auto labels = tp.predict(texts);
  std::vector<std::pair<std::string, std::string>> pred;
  for (std::size_t i = 0; i < labels.size(); ++i) pred.emplace_back(o.test.at(t)[i].id, labels[i]);
  return evaluate_predictions(pred, o.gold.at(t), task_labels(t)).macro_f1;
}

void criterion_1(const Olid& o) {
  std::size_t not_count = 0;
  for (const auto& e : o.train.examples) not_count += e.label_a == LabelA::NOT;
  const double acc = static_cast<double>(not_count) / static_cast<double>(o.train.size());
  report(1, std::abs(acc - 0.66) <= 0.02 ? Verdict::pass : Verdict::fail,
         "constant-NOT training accuracy " + fmt("%.4f", acc) + " (target 0.66 +/- 0.02, n=" +
             std::to_string(o.train.size()) + ")");
}

void criterion_2(const Olid& o) {
  const std::map<Task, double> floor = {{Task::A, 0.67}, {Task::B, 0.60}, {Task::C, 0.47}};
  bool ok = true;
  std::string detail = "lr+bow+RD test macro-F1";
  for (const auto& [task, min] : floor) {
    RunConfig cfg;
    cfg.task = task;
    cfg.model = ModelKind::lr;
    cfg.features = FeatureKind::bow;
    cfg.balance = true;
    const auto out = train_pipeline(cfg, default_prep(), o.train);
    const double f1 = test_macro_f1(out.pipeline, o, task);
    ok = ok && f1 >= min;
    detail += " " + std::string(to_string(task)) + "=" + fmt("%.4f", f1) + " (>=" + fmt("%.2f", min) + ")";
  }
  report(2, ok ? Verdict::pass : Verdict::fail, detail);
}

std::map<ModelKind, double> criterion_3(const Olid& o) {
  std::map<ModelKind, double> f1s;
  const std::map<ModelKind, double> floor = {{ModelKind::bilstm, 0.65}, {ModelKind::lstm, 0.64}};
  bool ok = true;
  std::string detail = "task A test macro-F1";
  for (const auto& [model, min] : floor) {
    RunConfig cfg;
    cfg.task = Task::A;
    cfg.model = model;
    cfg.features = FeatureKind::seq;
    const auto out = train_pipeline(cfg, default_prep(), o.train);
    f1s[model] = test_macro_f1(out.pipeline, o, Task::A);
    ok = ok && f1s[model] >= min;
    detail += " " + std::string(to_string(model)) + "=" + fmt("%.4f", f1s[model]) + " (>=" + fmt("%.2f", min) + ")";
  }
  report(3, ok ? Verdict::pass : Verdict::fail, detail);
  return f1s;
}

void criterion_4(const Olid& o) {
  struct Row {
    ModelKind model;
    bool balance;
    double target, tol;
  };
  const std::vector<Row> rows = {{ModelKind::nb, true, 0.7687, 0.08},
                                 {ModelKind::sgd, true, 0.7781, 0.08},
                                 {ModelKind::lr, false, 0.7282, 0.06}};
  bool ok = true;
  std::string detail = "90/10 holdout macro-F1, mean of seeds 1-3:";
  for (const auto& r : rows) {
    double total = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      RunConfig cfg;
      cfg.task = Task::A;
      cfg.model = r.model;
      cfg.features = FeatureKind::bow;
      cfg.balance = r.balance;
      cfg.split_ratio = 0.9;
      cfg.seed = seed;
      total += train_pipeline(cfg, default_prep(), o.train).holdout->macro_f1;
    }
    const double mean = total / 3.0;
    ok = ok && std::abs(mean - r.target) <= r.tol;
    detail += " " + std::string(to_string(r.model)) + (r.balance ? "+RD" : "") + "=" + fmt("%.4f", mean) + " (" +
              fmt("%.4f", r.target) + " +/- " + fmt("%.2f", r.tol) + ")";
  }
  report(4, ok ? Verdict::pass : Verdict::fail, detail);
}

// ------------------------------------------------------------- gradient suite

constexpr int kInstances = 24;
constexpr double kGradTol = 1e-4;

Tensor2<double> random_tensor(Rng& rng, std::size_t rows, std::size_t cols) {
  Tensor2<double> t(rows, cols);
  for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
  return t;
}

double weighted(std::span<const double> v, std::span<const double> r) {
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * r[i];
  return s;
}

// Relative error between `analytic` and the central difference of f over
// every entry of `params`.
double check(const std::vector<Tensor2<double>*>& params, const std::vector<double>& analytic,
             const std::function<double()>& f) {
  std::vector<double> values;
  for (auto* t : params) values.insert(values.end(), t->data.begin(), t->data.end());
  const auto write = [&] {
    std::size_t k = 0;
    for (auto* t : params)
      for (double& x : t->data) x = values[k++];
  };
  const auto numeric = ts::numeric_gradient(values, [&] {
    write();
    return f();
  });
  write();
  return ts::relative_error(analytic, numeric);
}

std::vector<double> flat(std::initializer_list<const Tensor2<double>*> list) {
  std::vector<double> out;
  for (const auto* t : list) out.insert(out.end(), t->data.begin(), t->data.end());
  return out;
}

// Worst relative error for one layer or loss over kInstances seeds.
using Instance = std::function<double(Rng&, int)>;

std::map<std::string, Instance> gradient_cases() {
  std::map<std::string, Instance> cases;
  cases["dense"] = [](Rng& rng, int) {
    DenseParams<double> p{random_tensor(rng, 3, 4), random_tensor(rng, 3, 1)};
    auto h = random_tensor(rng, 4, 1);
    const auto r = random_tensor(rng, 3, 1);
    auto g = DenseParams<double>::zeros(4, 3);
    Tensor2<double> dh(4, 1);
    dense_backward<double>(h.data, r.data, p, g, dh.data);
    const auto f = [&] { return weighted(dense_forward<double>(h.data, p), r.data); };
    return std::max(check({&p.W, &p.b}, flat({&g.W, &g.b}), f), check({&h}, dh.data, f));
  };
  cases["lstm"] = [](Rng& rng, int) {
    const std::size_t steps = 1 + rng.uniform_index(5);
    LstmParams<double> p{random_tensor(rng, 8, 3), random_tensor(rng, 8, 2), random_tensor(rng, 8, 1)};
    auto x = random_tensor(rng, steps, 3);
    const auto r = random_tensor(rng, 2, 1);
    auto g = LstmParams<double>::zeros(3, 2);
    Tensor2<double> dx(steps, 3);
    lstm_backward<double>(lstm_forward(x, p, steps), p, r.data, g, dx);
    const auto f = [&] { return weighted(lstm_forward(x, p, steps).final_hidden(), r.data); };
    return std::max(check({&p.W, &p.U, &p.b}, flat({&g.W, &g.U, &g.b}), f), check({&x}, dx.data, f));
  };
  cases["bilstm"] = [](Rng& rng, int) {
    const std::size_t steps = 1 + rng.uniform_index(5);
    LstmParams<double> pf{random_tensor(rng, 8, 2), random_tensor(rng, 8, 2), random_tensor(rng, 8, 1)};
    LstmParams<double> pb{random_tensor(rng, 8, 2), random_tensor(rng, 8, 2), random_tensor(rng, 8, 1)};
    auto x = random_tensor(rng, steps, 2);
    const auto r = random_tensor(rng, 4, 1);
    auto gf = LstmParams<double>::zeros(2, 2);
    auto gb = LstmParams<double>::zeros(2, 2);
    Tensor2<double> dx(steps, 2);
    bilstm_backward<double>(bilstm_forward(x, pf, pb, steps), pf, pb, r.data, gf, gb, dx);
    const auto f = [&] { return weighted(bilstm_forward(x, pf, pb, steps).output(), r.data); };
    return std::max(check({&pf.W, &pf.U, &pf.b, &pb.W, &pb.U, &pb.b},
                          flat({&gf.W, &gf.U, &gf.b, &gb.W, &gb.U, &gb.b}), f),
                    check({&x}, dx.data, f));
  };
  cases["conv+maxpool"] = [](Rng& rng, int) {
    const std::size_t window = 1 + rng.uniform_index(3);
    const std::size_t rows = window + rng.uniform_index(4);
    ConvParams<double> p{random_tensor(rng, 5, window * 2), random_tensor(rng, 5, 1), window};
    auto x = random_tensor(rng, rows, 2);
    const auto r = random_tensor(rng, 5, 1);
    auto g = ConvParams<double>::zeros(5, window, 2);
    Tensor2<double> dx(rows, 2);
    conv_pool_backward<double>(conv_pool_forward(x, p), p, r.data, g, dx);
    const auto f = [&] { return weighted(conv_pool_forward(x, p).pooled, r.data); };
    return std::max(check({&p.W, &p.b}, flat({&g.W, &g.b}), f), check({&x}, dx.data, f));
  };
  cases["embedding"] = [](Rng& rng, int) {
    EmbeddingParams<double> p{random_tensor(rng, 6, 3)};
    std::vector<std::uint32_t> idx(5);
    for (auto& i : idx) i = static_cast<std::uint32_t>(1 + rng.uniform_index(5));
    const auto r = random_tensor(rng, 5, 3);
    Tensor2<double> g(6, 3);
    embed_backward<double>(idx, r, g);
    const auto f = [&] { return weighted(embed_forward<double>(idx, p).data, r.data); };
    return check({&p.table}, g.data, f);
  };
  cases["loss:bce"] = [](Rng& rng, int i) {
    Tensor2<double> z(1, 1);
    z.data[0] = rng.uniform(-6.0, 6.0);
    const int y = i % 2;
    return check({&z}, {loss_bce_logits<double>(z.data[0], y).grad},
                 [&] { return loss_bce_logits<double>(z.data[0], y).loss; });
  };
  cases["loss:cross_entropy"] = [](Rng& rng, int) {
    auto s = random_tensor(rng, 3, 1);
    const std::size_t cls = rng.uniform_index(3);
    return check({&s}, loss_cross_entropy<double>(s.data, cls).grad,
                 [&] { return loss_cross_entropy<double>(s.data, cls).loss; });
  };
  cases["loss:mse"] = [](Rng& rng, int) {
    auto p = random_tensor(rng, 4, 1);
    const auto t = random_tensor(rng, 4, 1);
    return check({&p}, loss_mse<double>(p.data, t.data).grad, [&] { return loss_mse<double>(p.data, t.data).loss; });
  };
  for (Arch arch : {Arch::lstm, Arch::bilstm, Arch::cnn}) {
    cases["network:" + std::string(to_string(arch))] = [arch](Rng& rng, int i) {
      NetworkShape s{arch, 7, 3, 3, 4, 2, static_cast<std::size_t>(i % 2 ? 3 : 1)};
      auto net = Network<double>::zeros(s);
      net.init(rng);
      EncodedSequence seq;
      seq.true_length = 1 + rng.uniform_index(5);
      seq.indices.assign(6, kPadIndex);
      for (std::size_t t = 0; t < seq.true_length; ++t) seq.indices[t] = static_cast<std::uint32_t>(1 + rng.uniform_index(6));
      const std::size_t label = rng.uniform_index(s.outputs == 1 ? 2 : 3);
      std::vector<double> d;
      ForwardCache<double> cache;
      example_loss<double>(network_forward<double>(net, seq, DropoutMode::eval, 0.0, nullptr, &cache), label, d);
      auto grads = Network<double>::zeros(s);
      network_backward<double>(net, cache, d, grads);
      std::vector<Tensor2<double>*> params;
      std::vector<double> analytic;
      auto gs = grads.named_tensors();
      auto ps = net.named_tensors();
      for (std::size_t k = 0; k < ps.size(); ++k) {
        params.push_back(ps[k].second);
        analytic.insert(analytic.end(), gs[k].second->data.begin(), gs[k].second->data.end());
      }
      return check(params, analytic, [&] {
        std::vector<double> scratch;
        return example_loss<double>(network_forward<double>(net, seq, DropoutMode::eval, 0.0, nullptr), label, scratch)
            .loss;
      });
    };
  }
  return cases;
}

void criterion_5() {
  double worst = 0;
  std::string worst_name;
  const auto cases = gradient_cases();
  for (const auto& [name, run] : cases) {
    for (int i = 0; i < kInstances; ++i) {
      Rng rng(static_cast<std::uint64_t>(1000 * i + name.size()));
      const double err = run(rng, i);
      if (!(err <= worst)) {
        worst = err;
        worst_name = name;
      }
    }
  }
  report(5, worst < kGradTol ? Verdict::pass : Verdict::fail,
         std::to_string(cases.size()) + " layers/losses x " + std::to_string(kInstances) +
             " instances, worst relative error " + fmt("%.2e", worst) + " (" + worst_name + "), tolerance 1e-4");
}

// --------------------------------------------------------------- tiny overfit

void criterion_6(const std::optional<Olid>& olid) {
  const Dataset source = olid ? olid->train : ts::synthetic_olid({.n = 400, .seed = 31});
  const auto view = task_view(source, Task::A);
  TaskView subset{Task::A, {}};
  std::map<std::string, int> taken;
  for (const auto& p : view.pairs) {
    if (taken[p.label] < 16) {
      subset.pairs.push_back(p);
      ++taken[p.label];
    }
  }
  const auto prep = default_prep();
  std::vector<std::string> texts;
  for (const auto& p : subset.pairs) texts.push_back(p.text);
  const auto docs = prep.run(texts);
  const auto vocab = build_vocabulary(docs, 2500, VocabMode::sequence);
  const std::size_t max_len = corpus_max_len(docs);
  const auto classes = task_labels(Task::A);
  LabeledSequences data;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    data.seqs.push_back(word2idx_encode(docs[i], vocab, max_len));
    data.labels.push_back(subset.pairs[i].label == classes[1] ? 1 : 0);
  }

  bool ok = subset.size() == 32;
  std::string detail = std::string(olid ? "OLID" : "synthetic") + " 32-example balanced subset:";
  for (Arch arch : {Arch::lstm, Arch::bilstm, Arch::cnn}) {
    NetworkShape shape;
    shape.arch = arch;
    shape.vocab_rows = vocab.dimension();
    shape.emb_dim = arch == Arch::cnn ? 100 : 60;
    TrainConfig cfg;
    cfg.epochs = 300;
    cfg.patience = std::nullopt;
    cfg.seed = 7;
    const auto r = train_network<float>(shape, data, data, classes, cfg);
    int reached = 0;
    for (const auto& e : r.history.epochs) {
      if (e.val_acc == 1.0) {
        reached = e.epoch;
        break;
      }
    }
    ok = ok && reached > 0;
    detail += " " + std::string(to_string(arch)) + (reached ? " 100% at epoch " + std::to_string(reached) : " never 100%");
  }
  report(6, ok ? Verdict::pass : Verdict::fail, detail);
}

// ------------------------------------------------------------ oracle checks

// Posterior numerators from raw counts, with no logarithms.
std::vector<double> enumerated_bayes(const std::vector<SparseVector>& X, const std::vector<std::size_t>& y,
                                     std::size_t k, const SparseVector& x) {
  const std::size_t dim = X.front().dim;
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    double docs = 0, total = 0;
    std::vector<double> counts(dim, 0);
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (y[i] != c) continue;
      ++docs;
      for (const auto& [j, v] : X[i].entries) counts[j] += v, total += v;
    }
    double p = docs / static_cast<double>(X.size());
    for (const auto& [j, v] : x.entries)
      for (int rep = 0; rep < static_cast<int>(v); ++rep) p *= (counts[j] + 1.0) / (total + static_cast<double>(dim));
    out[c] = p;
  }
  return out;
}

bool nb_oracle(std::string& detail) {
  int mismatches = 0, cases = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const std::size_t dim = 2 + rng.uniform_index(4), k = 2 + rng.uniform_index(2);
    std::vector<SparseVector> X;
    std::vector<std::size_t> y;
    for (std::size_t i = 0; i < 6 + k; ++i) {
      SparseVector x{dim, {}};
      for (std::uint32_t j = 0; j < dim; ++j)
        if (rng.uniform01() < 0.5) x.entries.emplace_back(j, static_cast<double>(1 + rng.uniform_index(3)));
      X.push_back(x);
      y.push_back(i < k ? i : rng.uniform_index(k));
    }
    std::vector<std::string> classes;
    for (std::size_t c = 0; c < k; ++c) classes.push_back("c" + std::to_string(c));
    const auto m = nb_fit(X, y, classes);
    for (const auto& x : X) {
      const auto brute = enumerated_bayes(X, y, k, x);
      const auto joint = nb_joint_log(m, x);
      std::size_t best = 0;
      for (std::size_t c = 1; c < k; ++c)
        if (brute[c] > brute[best]) best = c;
      ++cases;
      bool same = nb_predict_index(m, x) == best;
      for (std::size_t c = 0; c < k; ++c) same = same && std::abs(std::exp(joint[c]) - brute[c]) <= 1e-12 * brute[c];
      mismatches += !same;
    }
  }
  detail += " NB " + std::to_string(cases - mismatches) + "/" + std::to_string(cases);
  return mismatches == 0;
}

bool tfidf_oracle(std::string& detail) {
  const std::vector<TokenList> docs = {{"a", "b", "b"}, {"b", "c"}, {"c", "c", "c", "d"}};
  const std::vector<std::vector<double>> bow = {{0, 2, 1, 0}, {1, 1, 0, 0}, {3, 0, 0, 1}};
  const std::vector<std::vector<double>> tfidf = {{0.0, 0.8355915419449176, 0.5493512310263033, 0.0},
                                                  {0.7071067811865476, 0.7071067811865476, 0.0, 0.0},
                                                  {0.9158903319694655, 0.0, 0.0, 0.40142857372745955}};
  const auto v = build_vocabulary(docs, kUnlimitedVocab, VocabMode::dense_count);
  std::vector<SparseVector> counts;
  for (const auto& d : docs) counts.push_back(bow_vectorize(d, v));
  const auto m = tfidf_fit(counts);
  double worst = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::vector<double> c(4, 0), w(4, 0);
    for (const auto& [j, val] : counts[i].entries) c[j] = val;
    for (const auto& [j, val] : tfidf_transform(counts[i], m).entries) w[j] = val;
    for (std::size_t j = 0; j < 4; ++j) worst = std::max({worst, std::abs(c[j] - bow[i][j]), std::abs(w[j] - tfidf[i][j])});
  }
  detail += ", BoW/TF-IDF max deviation " + fmt("%.1e", worst);
  return worst < 1e-9;
}

bool f1_oracle(std::string& detail) {
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const std::vector<std::string> classes = {"IND", "GRP", "OTH"};
    const std::size_t n = 1 + rng.uniform_index(25);
    std::vector<std::string> gold(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = classes[rng.uniform_index(3)];
      pred[i] = classes[rng.uniform_index(3)];
    }
    double macro = 0;
    for (const auto& c : classes) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < n; ++i) {
        tp += gold[i] == c && pred[i] == c;
        fp += gold[i] != c && pred[i] == c;
        fn += gold[i] == c && pred[i] != c;
      }
      const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
      const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
      macro += prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    }
    macro /= 3.0;
    mismatches += evaluate_labels(gold, pred, classes).macro_f1 != macro;
  }
  detail += ", macro-F1 " + std::to_string(200 - mismatches) + "/200 exact";
  return mismatches == 0;
}

void criterion_7() {
  std::string detail = "oracle agreement:";
  const bool nb = nb_oracle(detail);
  const bool tf = tfidf_oracle(detail);
  const bool f1 = f1_oracle(detail);
  report(7, nb && tf && f1 ? Verdict::pass : Verdict::fail, detail);
}

// ---------------------------------------------------------------- determinism

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + OFFEVAL_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void criterion_8() {
  const auto dir = ts::scratch_dir("acceptance_determinism");
  ts::write_olid_tsv(dir / "train.tsv", ts::synthetic_olid({.n = 300, .seed = 41}));
  ts::write_tweets_tsv(dir / "test.tsv", ts::synthetic_olid({.n = 80, .seed = 42}));
  const auto q = [&](const std::string& name) { return "\"" + (dir / name).string() + "\""; };
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"lr", "--task A --model lr --features tfidf --balance"},
      {"nb", "--task B --model nb --features bow"},
      {"sgd", "--task C --model sgd --features bow --binary"},
      {"lstm", "--task A --model lstm --features seq --epochs 2"},
      {"bilstm", "--task B --model bilstm --features seq --epochs 2"},
      {"cnn", "--task C --model cnn --features seq --epochs 2 --balance"}};
  bool ok = true;
  std::string detail = "same-seed runs byte-identical (model, predictions):";
  for (const auto& [name, flags] : commands) {
    std::string models[2], preds[2];
    bool ran = true;
    for (int run = 0; run < 2; ++run) {
      const std::string model = name + std::to_string(run) + ".json";
      const std::string pred = name + std::to_string(run) + ".csv";
      ran = ran && cli("train " + flags + " --seed 11 --train " + q("train.tsv") + " --out " + q(model), dir / "log") == 0;
      ran = ran && cli("predict --model " + q(model) + " --data " + q("test.tsv") + " --out " + q(pred), dir / "log") == 0;
      models[run] = ts::read_file(dir / model);
      preds[run] = ts::read_file(dir / pred);
    }
    const bool same = ran && !models[0].empty() && models[0] == models[1] && preds[0] == preds[1];
    ok = ok && same;
    detail += " " + name + (same ? " yes" : (ran ? " NO" : " (command failed)"));
  }
  report(8, ok ? Verdict::pass : Verdict::fail, detail);
}

}  // namespace

int main() {
  std::optional<Olid> olid;
  std::string olid_problem;
  try {
    olid = load_olid();
  } catch (const std::exception& e) {
    olid_problem = e.what();
  }
  const std::string skip_reason =
      olid_problem.empty() ? "OLID files not found (set OLID_DIR)" : "OLID files unreadable: " + olid_problem;

  const auto guarded = [](int id, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      report(id, Verdict::fail, std::string("exception: ") + e.what());
    }
  };

  std::map<ModelKind, double> neural_f1;
  if (olid) {
    guarded(1, [&] { criterion_1(*olid); });
    guarded(2, [&] { criterion_2(*olid); });
    guarded(3, [&] { neural_f1 = criterion_3(*olid); });
    guarded(4, [&] { criterion_4(*olid); });
  } else {
    for (int id = 1; id <= 4; ++id) report(id, Verdict::skip, skip_reason);
  }
  guarded(5, criterion_5);
  guarded(6, [&] { criterion_6(olid); });
  guarded(7, criterion_7);
  guarded(8, criterion_8);
  if (neural_f1.size() == 2) {
    const double bi = neural_f1[ModelKind::bilstm], uni = neural_f1[ModelKind::lstm];
    report(9, bi >= uni - 0.01 ? Verdict::pass : Verdict::fail,
           "bilstm " + fmt("%.4f", bi) + " vs lstm " + fmt("%.4f", uni) + " - 0.01", false);
  } else {
    report(9, Verdict::skip, olid ? "criterion 3 did not produce both scores" : skip_reason, false);
  }

  int failed = 0;
  for (const auto& l : g_lines) failed += l.blocking && l.verdict == Verdict::fail;
  std::printf("%d blocking failure(s)\n", failed);
  return failed ? 1 : 0;
}
