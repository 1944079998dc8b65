// OLID data loading, per-task views, train/validation splits and
// random-draw class balancing.
#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "offeval/error.hpp"
#include "offeval/rng.hpp"

namespace offeval {

enum class Task { A, B, C };

enum class LabelA { NOT, OFF };
enum class LabelB { UNT, TIN };
enum class LabelC { IND, GRP, OTH };

inline std::string_view to_string(Task t) {
  switch (t) {
    case Task::A: return "A";
    case Task::B: return "B";
    case Task::C: return "C";
  }
  return "?";
}

inline Task parse_task(std::string_view s) {
  if (s == "A" || s == "a") return Task::A;
  if (s == "B" || s == "b") return Task::B;
  if (s == "C" || s == "c") return Task::C;
  throw ConfigError("unknown task '" + std::string(s) + "' (expected A, B or C)");
}

inline std::string_view to_string(LabelA l) { return l == LabelA::OFF ? "OFF" : "NOT"; }
inline std::string_view to_string(LabelB l) { return l == LabelB::TIN ? "TIN" : "UNT"; }
inline std::string_view to_string(LabelC l) {
  switch (l) {
    case LabelC::IND: return "IND";
    case LabelC::GRP: return "GRP";
    case LabelC::OTH: return "OTH";
  }
  return "?";
}

// Ordered label set of a task. For binary tasks the second entry is the
// positive class of a single-logit model.
inline std::vector<std::string> task_labels(Task t) {
  switch (t) {
    case Task::A: return {"NOT", "OFF"};
    case Task::B: return {"UNT", "TIN"};
    case Task::C: return {"IND", "GRP", "OTH"};
  }
  return {};
}

struct Example {
  std::string id;
  std::string text;
  LabelA label_a = LabelA::NOT;
  std::optional<LabelB> label_b;
  std::optional<LabelC> label_c;
};

struct Dataset {
  std::vector<Example> examples;
  std::string source;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

struct LabeledText {
  std::string text;
  std::string label;
  std::string id;

  bool operator==(const LabeledText&) const = default;
};

struct TaskView {
  Task task = Task::A;
  std::vector<LabeledText> pairs;

  std::size_t size() const { return pairs.size(); }
};

// Id + tweet rows with no labels, as in the official test files.
struct TweetRow {
  std::string id;
  std::string text;
};

namespace detail {

inline std::vector<std::string_view> split_char(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

inline std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

}  // namespace detail

inline LabelA parse_label_a(std::string_view s) {
  if (s == "OFF") return LabelA::OFF;
  if (s == "NOT") return LabelA::NOT;
  throw DataError("unknown subtask_a label '" + std::string(s) + "'");
}

inline std::optional<LabelB> parse_label_b(std::string_view s) {
  if (s == "NULL") return std::nullopt;
  if (s == "TIN") return LabelB::TIN;
  if (s == "UNT") return LabelB::UNT;
  throw DataError("unknown subtask_b label '" + std::string(s) + "'");
}

inline std::optional<LabelC> parse_label_c(std::string_view s) {
  if (s == "NULL") return std::nullopt;
  if (s == "IND") return LabelC::IND;
  if (s == "GRP") return LabelC::GRP;
  if (s == "OTH") return LabelC::OTH;
  throw DataError("unknown subtask_c label '" + std::string(s) + "'");
}

// Checks the label hierarchy: B only under OFF, C only under TIN.
inline void validate(const Example& e) {
  if (e.id.empty()) throw DataError("example with empty id");
  if (e.label_b && e.label_a != LabelA::OFF)
    throw DataError("example " + e.id + ": subtask_b label on a NOT tweet");
  if (e.label_c && e.label_b != LabelB::TIN)
    throw DataError("example " + e.id + ": subtask_c label without TIN");
}

// Reads the 5-column OLID training format. The first line is a header.
inline Dataset parse_olid_tsv(std::istream& in, const std::string& source) {
  Dataset d;
  d.source = source;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(source + ": empty file (missing header)");
  ++line_no;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::strip_cr(line);
    if (row.empty()) continue;
    const auto cols = detail::split_char(row, '\t');
    if (cols.size() != 5) {
      throw DataError(detail::where(source, line_no) + ": expected 5 tab-separated columns, got " +
                      std::to_string(cols.size()));
    }
    Example e;
    e.id = std::string(cols[0]);
    e.text = std::string(cols[1]);
    try {
      e.label_a = parse_label_a(cols[2]);
      e.label_b = parse_label_b(cols[3]);
      e.label_c = parse_label_c(cols[4]);
      validate(e);
    } catch (const DataError& err) {
      throw DataError(detail::where(source, line_no) + ": " + err.what());
    }
    if (!seen.insert(e.id).second)
      throw DataError(detail::where(source, line_no) + ": duplicate id " + e.id);
    d.examples.push_back(std::move(e));
  }
  return d;
}

inline Dataset load_olid_tsv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_olid_tsv(in, path.string());
}

// Reads any tab-separated file with a header naming `id` and `tweet`
// columns; other columns are ignored.
inline std::vector<TweetRow> parse_tweets_tsv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file (missing header)");
  const auto header = detail::split_char(detail::strip_cr(line), '\t');
  std::optional<std::size_t> id_col, text_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "id") id_col = i;
    if (header[i] == "tweet") text_col = i;
  }
  if (!id_col || !text_col) throw DataError(source + ": header must contain 'id' and 'tweet' columns");
  std::vector<TweetRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::strip_cr(line);
    if (row.empty()) continue;
    const auto cols = detail::split_char(row, '\t');
    if (cols.size() != header.size()) {
      throw DataError(detail::where(source, line_no) + ": expected " + std::to_string(header.size()) +
                      " columns, got " + std::to_string(cols.size()));
    }
    rows.push_back({std::string(cols[*id_col]), std::string(cols[*text_col])});
  }
  return rows;
}

inline std::vector<TweetRow> load_tweets_tsv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_tweets_tsv(in, path.string());
}

// `id,label` lines, no header. Order preserved; duplicates rejected.
inline std::vector<std::pair<std::string, std::string>> load_label_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = detail::strip_cr(line);
    if (row.empty()) continue;
    const auto cols = detail::split_char(row, ',');
    if (cols.size() != 2) throw DataError(detail::where(path, line_no) + ": expected 'id,label'");
    std::string id(cols[0]);
    if (!seen.insert(id).second) throw DataError(detail::where(path, line_no) + ": duplicate id " + id);
    out.emplace_back(std::move(id), std::string(cols[1]));
  }
  return out;
}

inline void write_label_csv(const std::filesystem::path& path,
                            std::span<const std::pair<std::string, std::string>> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (const auto& [id, label] : rows) out << id << ',' << label << '\n';
}

// Seeded shuffle, then the first floor(ratio * n) examples form the first part.
inline std::pair<Dataset, Dataset> split_train_val(const Dataset& d, double ratio, std::uint64_t seed) {
  if (d.empty()) throw DataError("split_train_val: empty dataset");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split_train_val: ratio must be in (0, 1)");
  std::vector<std::size_t> order(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_first = static_cast<std::size_t>(ratio * static_cast<double>(d.size()));
  std::pair<Dataset, Dataset> parts;
  parts.first.source = d.source + "#train";
  parts.second.source = d.source + "#val";
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_first ? parts.first : parts.second).examples.push_back(d.examples[order[i]]);
  }
  return parts;
}

// Same contract as split_train_val, over a task view.
inline std::pair<TaskView, TaskView> split_view(const TaskView& v, double ratio, std::uint64_t seed) {
  if (v.pairs.empty()) throw DataError("split_view: empty view");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split_view: ratio must be in (0, 1)");
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_first = static_cast<std::size_t>(ratio * static_cast<double>(v.size()));
  std::pair<TaskView, TaskView> parts{{v.task, {}}, {v.task, {}}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_first ? parts.first : parts.second).pairs.push_back(v.pairs[order[i]]);
  }
  return parts;
}

inline TaskView task_view(const Dataset& d, Task task) {
  TaskView v{task, {}};
  for (const auto& e : d.examples) {
    switch (task) {
      case Task::A:
        v.pairs.push_back({e.text, std::string(to_string(e.label_a)), e.id});
        break;
      case Task::B:
        if (e.label_b) v.pairs.push_back({e.text, std::string(to_string(*e.label_b)), e.id});
        break;
      case Task::C:
        if (e.label_c) v.pairs.push_back({e.text, std::string(to_string(*e.label_c)), e.id});
        break;
    }
  }
  return v;
}

inline std::map<std::string, std::size_t> class_counts(const TaskView& v) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : v.pairs) ++counts[p.label];
  return counts;
}

// Undersamples every class of the task's label set to the smallest class
// count, then shuffles the result. Every label of the task must occur.
inline TaskView random_draw_balance(const TaskView& v, std::uint64_t seed) {
  const auto labels = task_labels(v.task);
  std::vector<std::vector<std::size_t>> by_class(labels.size());
  for (std::size_t i = 0; i < v.pairs.size(); ++i) {
    const auto it = std::find(labels.begin(), labels.end(), v.pairs[i].label);
    if (it == labels.end()) throw DataError("random_draw_balance: label '" + v.pairs[i].label + "' not in task");
    by_class[static_cast<std::size_t>(it - labels.begin())].push_back(i);
  }
  std::size_t m = v.pairs.size();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (by_class[c].empty()) throw DataError("random_draw_balance: class " + labels[c] + " has no examples");
    m = std::min(m, by_class[c].size());
  }
  Rng rng(seed);
  std::vector<std::size_t> kept;
  kept.reserve(m * labels.size());
  for (auto& members : by_class) {
    // Partial Fisher-Yates: the first m slots become a uniform sample.
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + rng.uniform_index(members.size() - i);
      std::swap(members[i], members[j]);
      kept.push_back(members[i]);
    }
  }
  rng.shuffle(std::span<std::size_t>(kept));
  TaskView out{v.task, {}};
  out.pairs.reserve(kept.size());
  for (std::size_t idx : kept) out.pairs.push_back(v.pairs[idx]);
  return out;
}

}  // namespace offeval
