// Accuracy, per-class precision/recall/F1 and macro-F1.
#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "offeval/error.hpp"

namespace offeval {

struct ConfusionMatrix {
  std::vector<std::string> classes;
  // counts[gold][predicted]
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& row : counts)
      for (std::size_t c : row) n += c;
    return n;
  }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  std::vector<std::string> classes;
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::size_t total = 0;
};

inline ConfusionMatrix confusion(std::span<const std::string> gold, std::span<const std::string> pred,
                                 std::vector<std::string> classes) {
  if (gold.size() != pred.size()) throw ShapeError("confusion: gold and prediction lengths differ");
  ConfusionMatrix cm{std::move(classes), {}};
  cm.counts.assign(cm.classes.size(), std::vector<std::size_t>(cm.classes.size(), 0));
  const auto index = [&](const std::string& label) {
    const auto it = std::find(cm.classes.begin(), cm.classes.end(), label);
    if (it == cm.classes.end()) throw DataError("confusion: unknown label '" + label + "'");
    return static_cast<std::size_t>(it - cm.classes.begin());
  };
  for (std::size_t i = 0; i < gold.size(); ++i) ++cm.counts[index(gold[i])][index(pred[i])];
  return cm;
}

// Zero denominators give 0. The macro mean runs over every listed class,
// including classes absent from both gold and predictions.
inline MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::size_t k = cm.classes.size();
  MetricsReport r;
  r.classes = cm.classes;
  r.total = cm.total();
  if (r.total == 0) throw DataError("metrics: empty confusion matrix");
  std::size_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t tp = cm.counts[c][c];
    std::size_t gold_c = 0, pred_c = 0;
    for (std::size_t j = 0; j < k; ++j) {
      gold_c += cm.counts[c][j];
      pred_c += cm.counts[j][c];
    }
    ClassMetrics m;
    m.support = gold_c;
    m.precision = pred_c ? static_cast<double>(tp) / static_cast<double>(pred_c) : 0.0;
    m.recall = gold_c ? static_cast<double>(tp) / static_cast<double>(gold_c) : 0.0;
    const double pr = m.precision + m.recall;
    m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
    r.per_class.push_back(m);
    r.macro_f1 += m.f1;
    correct += tp;
  }
  r.macro_f1 = k ? r.macro_f1 / static_cast<double>(k) : 0.0;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.total);
  return r;
}

inline MetricsReport evaluate_labels(std::span<const std::string> gold, std::span<const std::string> pred,
                                     std::vector<std::string> classes) {
  return metrics(confusion(gold, pred, std::move(classes)));
}

inline void print_report(std::ostream& out, const MetricsReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %10s %10s %10s %8s\n", "class", "precision", "recall", "f1", "support");
  out << buf;
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& m = r.per_class[c];
    std::snprintf(buf, sizeof buf, "%-8s %10.4f %10.4f %10.4f %8zu\n", r.classes[c].c_str(), m.precision, m.recall,
                  m.f1, m.support);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "accuracy %.4f\nmacro_f1 %.4f\nn        %zu\n", r.accuracy, r.macro_f1, r.total);
  out << buf;
}

// metric,class,value rows; overall rows use class "all".
inline void write_report_csv(std::ostream& out, const MetricsReport& r) {
  char buf[128];
  out << "metric,class,value\n";
  std::snprintf(buf, sizeof buf, "accuracy,all,%.10g\nmacro_f1,all,%.10g\n", r.accuracy, r.macro_f1);
  out << buf;
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& m = r.per_class[c];
    const char* name = r.classes[c].c_str();
    std::snprintf(buf, sizeof buf, "precision,%s,%.10g\nrecall,%s,%.10g\nf1,%s,%.10g\n", name, m.precision, name,
                  m.recall, name, m.f1);
    out << buf;
  }
}

}  // namespace offeval
