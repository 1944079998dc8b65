// offeval: train, predict and evaluate offensive-language classifiers.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "offeval/corpus.hpp"
#include "offeval/eval.hpp"
#include "offeval/modelfile.hpp"
#include "offeval/pipeline.hpp"

#ifndef OFFEVAL_DATA_DIR
#define OFFEVAL_DATA_DIR "data"
#endif

namespace {

struct TrainArgs {
  std::string task = "A";
  std::string model = "lr";
  std::string features = "bow";
  std::string train_path;
  std::string val_path;
  std::string union_path;
  std::string out_path;
  std::string history_path;
  std::string abbreviations = std::string(OFFEVAL_DATA_DIR) + "/abbreviations.tsv";
  std::string stopwords = std::string(OFFEVAL_DATA_DIR) + "/stopwords.txt";
  std::string optimizer = "adam";
  int patience = 2;
  std::optional<double> l2;
  std::optional<double> lr;
  std::optional<int> epochs;
  bool keep_mentions = false, keep_urls = false, keep_punctuation = false, keep_symbols = false;
  bool keep_case = false, no_expand = false;
};

void add_train_options(CLI::App& cmd, TrainArgs& a, offeval::RunConfig& cfg) {
  cmd.add_option("--task", a.task, "Task: A (OFF/NOT), B (TIN/UNT) or C (IND/GRP/OTH)")
      ->check(CLI::IsMember({"A", "B", "C", "a", "b", "c"}))
      ->capture_default_str();
  cmd.add_option("--model", a.model, "lr, nb, sgd, lstm, bilstm or cnn")
      ->check(CLI::IsMember({"lr", "nb", "sgd", "lstm", "bilstm", "cnn"}))
      ->capture_default_str();
  cmd.add_option("--features", a.features, "bow, tfidf or seq")
      ->check(CLI::IsMember({"bow", "tfidf", "seq"}))
      ->capture_default_str();
  cmd.add_option("--train", a.train_path, "OLID training TSV")->required();
  cmd.add_option("--val", a.val_path, "OLID-format validation TSV (replaces the internal split)");
  cmd.add_option("--out", a.out_path, "Model file to write")->required();
  cmd.add_option("--history", a.history_path, "Per-epoch CSV for neural models");
  cmd.add_flag("--balance", cfg.balance, "Random draw: undersample training classes to the smallest one");
  cmd.add_flag("--binary", cfg.binary_features, "0/1 presence instead of counts");
  cmd.add_option("--vocab-union", a.union_path,
                 "Also build the vocabulary from this TSV (id + tweet columns); leaks test vocabulary");
  cmd.add_option("--seed", cfg.seed, "Seed for splits, random draw, shuffling and initialization")
      ->capture_default_str();
  cmd.add_option("--vocab-size", cfg.vocab_size, "Vocabulary cap (default 2500 for seq, unlimited otherwise)");
  cmd.add_option("--max-len", cfg.max_len, "Sequence length (default: longest training tweet)");
  cmd.add_option("--split", cfg.split_ratio, "Train fraction of the internal split (default 0.9 neural, off linear)")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--l2", a.l2, "L2 strength (default 1e-4 linear, 1e-5 neural)");
  cmd.add_option("--lr", a.lr, "Learning rate (default 0.1 lr, 0.01 sgd, 1e-3 neural)");
  cmd.add_option("--epochs", a.epochs, "Neural epochs (default per task/model) or linear max epochs (500)");
  cmd.add_option("--tol", cfg.fit.tol, "Linear convergence tolerance")->capture_default_str();
  cmd.add_option("--alpha", cfg.nb_alpha, "Naive Bayes smoothing")->capture_default_str();
  cmd.add_option("--batch-size", cfg.train.batch_size, "Neural mini-batch size")->capture_default_str();
  cmd.add_option("--optimizer", a.optimizer, "adam or sgd")
      ->check(CLI::IsMember({"adam", "sgd"}))
      ->capture_default_str();
  cmd.add_option("--dropout", cfg.train.dropout_p, "Dropout probability")->capture_default_str();
  cmd.add_option("--patience", a.patience, "Early-stopping patience in epochs (0 disables)")->capture_default_str();
  cmd.add_option("--emb-dim", cfg.emb_dim, "Embedding size (default 60 recurrent, 100 cnn)");
  cmd.add_option("--hidden", cfg.hidden, "LSTM hidden size")->capture_default_str();
  cmd.add_option("--filters", cfg.filters, "CNN filter count")->capture_default_str();
  cmd.add_option("--window", cfg.window, "CNN window")->capture_default_str();
  cmd.add_option("--abbreviations", a.abbreviations, "Abbreviation lexicon (key<TAB>replacement)")
      ->capture_default_str();
  cmd.add_option("--stopwords", a.stopwords, "Stopword list, one per line")->capture_default_str();
  cmd.add_flag("--keep-mentions", a.keep_mentions, "Do not remove @USER tokens");
  cmd.add_flag("--keep-urls", a.keep_urls, "Do not remove URL tokens");
  cmd.add_flag("--keep-punctuation", a.keep_punctuation, "Do not strip punctuation");
  cmd.add_flag("--keep-symbols", a.keep_symbols, "Do not strip symbols");
  cmd.add_flag("--keep-case", a.keep_case, "Do not lowercase");
  cmd.add_flag("--no-expand", a.no_expand, "Do not expand abbreviations");
  cmd.add_flag("--remove-emoji", cfg.clean.remove_emoji, "Remove emoji");
  cmd.add_flag("--remove-hashtags", cfg.clean.remove_hashtags, "Remove whole #hashtags");
  cmd.add_flag("--remove-numbers", cfg.clean.remove_numbers, "Remove digits");
  cmd.add_flag("--remove-stopwords", cfg.clean.remove_stopwords, "Remove stopwords");
}

int run_train(TrainArgs& a, offeval::RunConfig& cfg) {
  using namespace offeval;
  cfg.task = parse_task(a.task);
  cfg.model = parse_model_kind(a.model);
  cfg.features = parse_feature_kind(a.features);
  cfg.clean.remove_user_mentions = !a.keep_mentions;
  cfg.clean.remove_url_tokens = !a.keep_urls;
  cfg.clean.remove_punctuation = !a.keep_punctuation;
  cfg.clean.remove_symbols = !a.keep_symbols;
  cfg.clean.lowercase = !a.keep_case;
  cfg.clean.expand_abbreviations = !a.no_expand;
  cfg.train.optimizer = a.optimizer == "sgd" ? nn::Optimizer::sgd : nn::Optimizer::adam;
  cfg.train.patience = a.patience > 0 ? std::optional<int>(a.patience) : std::nullopt;
  if (a.l2) cfg.fit.l2_lambda = cfg.train.l2_lambda = *a.l2;
  if (a.lr) {
    cfg.fit.learning_rate = cfg.train.learning_rate = *a.lr;
    cfg.fit_lr_set = true;
  }
  if (a.epochs) {
    cfg.train.epochs = cfg.fit.max_epochs = *a.epochs;
    cfg.epochs_set = true;
  }
  cfg.vocab_union = !a.union_path.empty();
  cfg.validate();

  Preprocessor prep;
  prep.clean = cfg.clean;
  if (cfg.clean.expand_abbreviations) prep.lexicon = AbbreviationLexicon::load(a.abbreviations);
  if (cfg.clean.remove_stopwords) prep.stopwords = load_stopwords(a.stopwords);

  const Dataset train = load_olid_tsv(a.train_path);
  std::optional<Dataset> val;
  if (!a.val_path.empty()) val = load_olid_tsv(a.val_path);
  std::vector<std::string> union_texts;
  if (cfg.vocab_union) {
    for (auto& row : load_tweets_tsv(a.union_path)) union_texts.push_back(std::move(row.text));
  }

  const auto outcome = train_pipeline(cfg, prep, train, val ? &*val : nullptr, union_texts);
  save_model(a.out_path, outcome.pipeline);
  std::cout << "trained " << to_string(cfg.model) << " on task " << to_string(cfg.task) << " ("
            << outcome.train_examples << " examples, vocabulary " << outcome.pipeline.features.vocab.size()
            << ") -> " << a.out_path << "\n";
  if (outcome.history) {
    std::cout << "epochs run " << outcome.history->epochs.size() << ", best epoch " << outcome.history->best_epoch
              << "\n";
    if (!a.history_path.empty()) {
      std::ofstream h(a.history_path);
      if (!h) throw DataError("cannot write history file '" + a.history_path + "'");
      outcome.history->write_csv(h);
    }
  }
  if (outcome.holdout) {
    std::cout << "validation metrics:\n";
    print_report(std::cout, *outcome.holdout);
  }
  return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path) {
  using namespace offeval;
  const TrainedPipeline tp = load_model(model_path);
  const auto rows = load_tweets_tsv(data_path);
  std::vector<std::string> texts;
  texts.reserve(rows.size());
  for (const auto& r : rows) texts.push_back(r.text);
  const auto labels = tp.predict(texts);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.emplace_back(rows[i].id, labels[i]);
  write_label_csv(out_path, out);
  std::cout << "wrote " << out.size() << " predictions to " << out_path << "\n";
  return 0;
}

int run_evaluate(const std::string& pred_path, const std::string& gold_path, const std::string& task,
                 const std::string& csv_path) {
  using namespace offeval;
  const auto pred = load_label_csv(pred_path);
  const auto gold = load_label_csv(gold_path);
  std::vector<std::string> classes;
  if (!task.empty()) classes = task_labels(parse_task(task));
  const auto report = evaluate_predictions(pred, gold, classes);
  print_report(std::cout, report);
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw DataError("cannot write report '" + csv_path + "'");
    write_report_csv(out, report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offensive-language classification: train, predict, evaluate"};
  app.set_config("--config", "", "INI/TOML config file ([train] section); command-line flags win");
  app.require_subcommand(1);

  TrainArgs targs;
  offeval::RunConfig cfg;
  auto* train = app.add_subcommand("train", "Fit a model and write a model file");
  add_train_options(*train, targs, cfg);

  std::string model_path, data_path, out_path;
  auto* predict = app.add_subcommand("predict", "Write id,label predictions for a TSV with id and tweet columns");
  predict->add_option("--model", model_path, "Model file")->required();
  predict->add_option("--data", data_path, "TSV with id and tweet columns")->required();
  predict->add_option("--out", out_path, "Output CSV (id,label, no header)")->required();

  std::string pred_path, gold_path, eval_task, csv_path;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold labels");
  evaluate->add_option("--pred", pred_path, "Predictions CSV (id,label)")->required();
  evaluate->add_option("--gold", gold_path, "Gold CSV (id,label)")->required();
  evaluate->add_option("--task", eval_task, "Label set to average over (default: inferred)")
      ->check(CLI::IsMember({"A", "B", "C", "a", "b", "c"}));
  evaluate->add_option("--csv", csv_path, "Also write the report as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train->parsed()) return run_train(targs, cfg);
    if (predict->parsed()) return run_predict(model_path, data_path, out_path);
    if (evaluate->parsed()) return run_evaluate(pred_path, gold_path, eval_task, csv_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
