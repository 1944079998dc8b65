#include <gtest/gtest.h>

#include <cstdlib>

#include "support/synthetic.hpp"

namespace fs = std::filesystem;
namespace ts = offeval::testing;

namespace {

struct Run {
  int status;
  std::string output;
};

Run offeval_cli(const std::string& args, const fs::path& dir) {
  const auto log = dir / "cli.log";
  const std::string cmd = std::string("\"") + OFFEVAL_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ts::read_file(log)};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = ts::scratch_dir("cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    ts::write_olid_tsv(dir / "train.tsv", ts::synthetic_olid({.n = 300, .seed = 21}));
    test = ts::synthetic_olid({.n = 50, .seed = 22});
    ts::write_tweets_tsv(dir / "test.tsv", test);
    std::ofstream gold(dir / "gold.csv");
    for (const auto& e : test.examples) gold << e.id << ',' << offeval::to_string(e.label_a) << '\n';
  }

  std::string p(const char* name) const { return "\"" + (dir / name).string() + "\""; }

  fs::path dir;
  offeval::Dataset test;
};

}  // namespace

TEST_F(Cli, TrainPredictEvaluate) {
  auto r = offeval_cli("train --task A --model lr --features tfidf --train " + p("train.tsv") + " --out " +
                           p("lr.json"),
                       dir);
  ASSERT_EQ(r.status, 0) << r.output;
  r = offeval_cli("predict --model " + p("lr.json") + " --data " + p("test.tsv") + " --out " + p("pred.csv"), dir);
  ASSERT_EQ(r.status, 0) << r.output;
  const auto pred = ts::read_file(dir / "pred.csv");
  EXPECT_EQ(line_count(pred), test.size());
  EXPECT_EQ(pred.rfind(test.examples[0].id + ",", 0), 0u);
  r = offeval_cli("evaluate --pred " + p("pred.csv") + " --gold " + p("gold.csv") + " --csv " + p("report.csv"), dir);
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("macro_f1"), std::string::npos);
  EXPECT_EQ(ts::read_file(dir / "report.csv").rfind("metric,class,value\naccuracy,all,", 0), 0u);
}

TEST_F(Cli, NeuralTrainWritesHistory) {
  const auto r = offeval_cli("train --task A --model cnn --features seq --epochs 2 --emb-dim 8 --filters 8 --train " +
                                 p("train.tsv") + " --out " + p("cnn.json") + " --history " + p("hist.csv"),
                             dir);
  ASSERT_EQ(r.status, 0) << r.output;
  const auto hist = ts::read_file(dir / "hist.csv");
  EXPECT_EQ(hist.rfind("epoch,train_loss,val_loss,val_acc,val_macro_f1\n", 0), 0u);
  EXPECT_EQ(line_count(hist), 3u);
}

TEST_F(Cli, SameSeedGivesIdenticalFiles) {
  for (const char* out : {"a.json", "b.json"}) {
    const auto r = offeval_cli("train --task A --model sgd --train " + p("train.tsv") + " --seed 5 --out " + p(out), dir);
    ASSERT_EQ(r.status, 0) << r.output;
  }
  EXPECT_EQ(ts::read_file(dir / "a.json"), ts::read_file(dir / "b.json"));
}

TEST_F(Cli, ConfigFileSuppliesTrainOptions) {
  std::ofstream(dir / "run.ini") << "[train]\ntask=C\nmodel=nb\nfeatures=bow\n";
  const auto r = offeval_cli("--config " + p("run.ini") + " train --train " + p("train.tsv") + " --out " + p("nb.json"),
                             dir);
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("on task C"), std::string::npos);
}

TEST_F(Cli, ErrorsAreOneLineAndNonZero) {
  auto r = offeval_cli("train --task A --model lstm --features bow --train " + p("train.tsv") + " --out " + p("x.json"),
                       dir);
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(r.output.rfind("error: ", 0), 0u) << r.output;
  EXPECT_EQ(line_count(r.output), 1u);
  EXPECT_FALSE(fs::exists(dir / "x.json"));

  r = offeval_cli("train --task A --model lr --train " + p("missing.tsv") + " --out " + p("x.json"), dir);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("missing.tsv"), std::string::npos);

  std::ofstream(dir / "bad.json") << "{\"format\": \"offeval-model\", \"format_version\": 99}";
  r = offeval_cli("predict --model " + p("bad.json") + " --data " + p("test.tsv") + " --out " + p("o.csv"), dir);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.output.find("version"), std::string::npos);

  r = offeval_cli("frobnicate", dir);
  EXPECT_NE(r.status, 0);
}
