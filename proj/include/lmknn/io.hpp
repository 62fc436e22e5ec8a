#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmknn/dataset.hpp"
#include "lmknn/error.hpp"
#include "lmknn/eval.hpp"
#include "lmknn/lmnn.hpp"
#include "lmknn/synth.hpp"

namespace lmknn {

/// Round-trip-exact decimal rendering of a double.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open for reading: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dataset CSV: header row, feature columns, final column `label`.

inline void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (const auto& name : data.feature_names) out << name << ",";
  out << "label\n";
  for (const auto& inst : data.instances) {
    for (double v : inst.x) out << format_full(v) << ",";
    out << data.class_names[static_cast<std::size_t>(inst.label)] << "\n";
  }
}

inline void write_dataset_csv(const std::string& path, const Dataset& data) {
  auto out = detail::open_output(path);
  write_dataset_csv(out, data);
}

inline Dataset read_dataset_csv(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty dataset file: " + path);
  auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header.back() != "label")
    throw io_error("dataset header must end with a `label` column: " + path);

  Dataset data;
  data.feature_names.assign(header.begin(), header.end() - 1);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw io_error(path + ":" + std::to_string(line_no) + ": expected " +
                     std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
    LabeledInstance inst;
    inst.x.reserve(fields.size() - 1);
    for (std::size_t f = 0; f + 1 < fields.size(); ++f) {
      const auto v = detail::parse_double(fields[f]);
      if (!v) throw io_error(path + ":" + std::to_string(line_no) + ": bad number `" + fields[f] + "`");
      inst.x.push_back(*v);
    }
    const std::string& label = fields.back();
    int id = data.class_index(label);
    if (id < 0) {
      id = static_cast<int>(data.class_names.size());
      data.class_names.push_back(label);
    }
    inst.label = id;
    data.instances.push_back(std::move(inst));
  }
  return data;
}

/// Query CSV for classification: same layout as a dataset CSV but the
/// label column is optional and ignored when present.
inline std::vector<std::vector<double>> read_queries_csv(const std::string& path,
                                                         const std::vector<std::string>& features) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("empty query file: " + path);
  const auto header = detail::split_csv_line(line);

  std::vector<int> cols;
  for (const auto& name : features) {
    int found = -1;
    for (std::size_t h = 0; h < header.size(); ++h)
      if (header[h] == name) found = static_cast<int>(h);
    if (found < 0) throw io_error("query file missing feature column `" + name + "`: " + path);
    cols.push_back(found);
  }

  std::vector<std::vector<double>> queries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw io_error(path + ":" + std::to_string(line_no) + ": ragged row");
    std::vector<double> q;
    q.reserve(cols.size());
    for (int c : cols) {
      const auto v = detail::parse_double(fields[static_cast<std::size_t>(c)]);
      if (!v) throw io_error(path + ":" + std::to_string(line_no) + ": bad number");
      q.push_back(*v);
    }
    queries.push_back(std::move(q));
  }
  return queries;
}

// ---------------------------------------------------------------------------
// Signal files: CSV with one window per row (optional trailing label),
// or plain text with one sample per line forming a single window.

inline void write_signals_csv(const std::string& path, const SignalDataset& signals) {
  auto out = detail::open_output(path);
  if (signals.windows.empty()) throw invalid_argument("no windows to write");
  const std::size_t n = signals.windows.front().size();
  for (std::size_t s = 0; s < n; ++s) out << "s" << s << ",";
  out << "label\n";
  for (std::size_t w = 0; w < signals.windows.size(); ++w) {
    for (double v : signals.windows[w].samples) out << format_full(v) << ",";
    out << signals.class_names[static_cast<std::size_t>(signals.labels[w])] << "\n";
  }
}

inline SignalDataset read_signals(const std::string& path) {
  auto in = detail::open_input(path);
  SignalDataset out;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line))
    if (!detail::trim(line).empty()) lines.push_back(line);
  if (lines.empty()) throw io_error("empty signal file: " + path);

  const bool csv = lines.front().find(',') != std::string::npos;
  if (!csv) {
    // One real per line: a single unlabeled window.
    Signal signal;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto v = detail::parse_double(detail::trim(lines[i]));
      if (!v) throw io_error(path + ":" + std::to_string(i + 1) + ": bad number");
      signal.samples.push_back(*v);
    }
    out.windows.push_back(std::move(signal));
    out.labels.push_back(-1);
    return out;
  }

  // Sniff the first row: all fields numeric = headerless unlabeled data;
  // only the last field non-numeric = headerless labeled data; all fields
  // non-numeric = header (labeled when it ends in `label`).
  std::size_t first_row = 0;
  bool labeled = false;
  {
    const auto fields = detail::split_csv_line(lines.front());
    std::size_t non_numeric = 0;
    for (const auto& f : fields)
      if (!detail::parse_double(f)) ++non_numeric;
    if (non_numeric == 0) {
      labeled = false;
    } else if (non_numeric == 1 && !detail::parse_double(fields.back())) {
      labeled = true;
    } else if (non_numeric == fields.size()) {
      first_row = 1;
      labeled = fields.back() == "label";
    } else {
      throw io_error("cannot tell header from data in the first row: " + path);
    }
  }

  for (std::size_t r = first_row; r < lines.size(); ++r) {
    const auto fields = detail::split_csv_line(lines[r]);
    const std::size_t n_samples = fields.size() - (labeled ? 1 : 0);
    Signal signal;
    signal.samples.reserve(n_samples);
    for (std::size_t f = 0; f < n_samples; ++f) {
      const auto v = detail::parse_double(fields[f]);
      if (!v) throw io_error(path + ":" + std::to_string(r + 1) + ": bad number `" + fields[f] + "`");
      signal.samples.push_back(*v);
    }
    if (labeled) {
      const std::string& label = fields.back();
      int id = -1;
      for (std::size_t c = 0; c < out.class_names.size(); ++c)
        if (out.class_names[c] == label) id = static_cast<int>(c);
      if (id < 0) {
        id = static_cast<int>(out.class_names.size());
        out.class_names.push_back(label);
      }
      out.labels.push_back(id);
    } else {
      out.labels.push_back(-1);
    }
    out.windows.push_back(std::move(signal));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Selected-feature list: one name per line.

inline void write_feature_list(const std::string& path, const std::vector<std::string>& names) {
  auto out = detail::open_output(path);
  for (const auto& n : names) out << n << "\n";
}

inline std::vector<std::string> read_feature_list(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (!t.empty()) names.push_back(t);
  }
  return names;
}

// ---------------------------------------------------------------------------
// Model file: version line, feature names, class labels, dimension,
// row-major matrix at full precision, then config as key=value lines.

inline constexpr int kModelFormatVersion = 1;

struct Model {
  Metric metric;
  std::vector<std::string> class_names;
  TrainConfig config;
};

namespace detail {

inline std::string join(const std::vector<std::string>& parts, char sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

}  // namespace detail

inline void save_model(const std::string& path, const Model& model) {
  auto out = detail::open_output(path);
  const std::size_t n = model.metric.dimension();
  out << kModelFormatVersion << "\n";
  out << detail::join(model.metric.feature_names, ',') << "\n";
  out << detail::join(model.class_names, ',') << "\n";
  out << n << "\n";
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (c) out << " ";
      out << format_full(model.metric.m(r, c));
    }
    out << "\n";
  }
  const TrainConfig& cfg = model.config;
  out << "k=" << cfg.k << "\n";
  out << "mu=" << format_full(cfg.mu) << "\n";
  out << "step=" << format_full(cfg.step) << "\n";
  out << "max_iterations=" << cfg.max_iterations << "\n";
  out << "seed=" << cfg.seed << "\n";
  out << "standardize=" << (cfg.standardize ? 1 : 0) << "\n";
  out << "unweighted_pull=" << (cfg.unweighted_pull ? 1 : 0) << "\n";
  out << "restrict_impostors=" << (cfg.restrict_impostors ? 1 : 0) << "\n";
}

inline Model load_model(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;

  auto next_line = [&]() {
    if (!std::getline(in, line)) throw io_error("truncated model file: " + path);
    return detail::trim(line);
  };

  Model model;
  const std::string version = next_line();
  if (version != std::to_string(kModelFormatVersion))
    throw io_error("unsupported model format version `" + version + "`: " + path);
  model.metric.feature_names = detail::split_csv_line(next_line());
  model.class_names = detail::split_csv_line(next_line());

  const std::string dim_line = next_line();
  char* dim_end = nullptr;
  const unsigned long n_parsed = std::strtoul(dim_line.c_str(), &dim_end, 10);
  if (dim_end != dim_line.c_str() + dim_line.size() || n_parsed < 1)
    throw io_error("bad model dimension `" + dim_line + "`: " + path);
  const std::size_t n = n_parsed;
  if (n != model.metric.feature_names.size())
    throw io_error("model dimension does not match feature names: " + path);

  model.metric.m = Matrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    std::istringstream row(next_line());
    for (std::size_t c = 0; c < n; ++c) {
      if (!(row >> model.metric.m(r, c)))
        throw io_error("bad matrix row " + std::to_string(r) + ": " + path);
    }
  }

  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) throw io_error("bad config line `" + t + "`: " + path);
    const std::string key = t.substr(0, eq);
    const std::string value = t.substr(eq + 1);
    if (key == "seed") {
      char* end = nullptr;
      model.config.seed = std::strtoull(value.c_str(), &end, 10);
      if (end != value.c_str() + value.size())
        throw io_error("bad config value `" + t + "`: " + path);
      continue;
    }
    const auto num = detail::parse_double(value);
    if (!num) throw io_error("bad config value `" + t + "`: " + path);
    if (key == "k")
      model.config.k = static_cast<int>(*num);
    else if (key == "mu")
      model.config.mu = *num;
    else if (key == "step")
      model.config.step = *num;
    else if (key == "max_iterations")
      model.config.max_iterations = static_cast<int>(*num);
    else if (key == "standardize")
      model.config.standardize = *num != 0;
    else if (key == "unweighted_pull")
      model.config.unweighted_pull = *num != 0;
    else if (key == "restrict_impostors")
      model.config.restrict_impostors = *num != 0;
    else
      throw io_error("unknown config key `" + key + "`: " + path);
  }
  return model;
}

// ---------------------------------------------------------------------------
// JSON evaluation report. Rows of the confusion block are actual classes,
// columns predicted; the orientation field records that explicitly.

inline nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["confusion"] = {
      {"labels", report.confusion.labels},
      {"rows", report.confusion.counts},
      {"orientation", "rows=actual, columns=predicted"},
  };
  j["config"] = {
      {"k", report.config.k},
      {"mu", report.config.mu},
      {"step", report.config.step},
      {"max_iterations", report.config.max_iterations},
      {"standardize", report.config.standardize},
      {"unweighted_pull", report.config.unweighted_pull},
      {"restrict_impostors", report.config.restrict_impostors},
      {"test_per_class", report.test_per_class},
  };
  j["seed"] = report.split_seed;
  return j;
}

inline void write_report_json(const std::string& path, const EvalReport& report) {
  auto out = detail::open_output(path);
  out << report_to_json(report).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Sweep CSVs: full grid plus per-cell summary.

inline void write_sweep_cells_csv(const std::string& path, const SweepResult& result) {
  auto out = detail::open_output(path);
  out << "k,test_size,trial,accuracy\n";
  for (const auto& c : result.cells)
    out << c.k << "," << c.test_size << "," << c.trial << "," << format_full(c.accuracy) << "\n";
}

inline void write_sweep_summary_csv(const std::string& path, const SweepResult& result) {
  auto out = detail::open_output(path);
  out << "k,test_size,mean_accuracy,stddev_accuracy\n";
  for (const auto& s : result.summary)
    out << s.k << "," << s.test_size << "," << format_full(s.mean_accuracy) << ","
        << format_full(s.stddev_accuracy) << "\n";
}

// ---------------------------------------------------------------------------
// Feature CSV from raw windows (extract stage): canonical feature columns
// plus a label column when the windows carry labels.

inline void write_features_csv(const std::string& path, const SignalDataset& signals) {
  auto out = detail::open_output(path);
  const bool labeled = !signals.class_names.empty();
  const auto& names = feature_names();
  for (std::size_t f = 0; f < names.size(); ++f) {
    if (f) out << ",";
    out << names[f];
  }
  out << (labeled ? ",label" : "") << "\n";
  for (std::size_t w = 0; w < signals.windows.size(); ++w) {
    const FeatureVector fv = extract_features(signals.windows[w]);
    for (std::size_t f = 0; f < fv.values.size(); ++f) {
      if (f) out << ",";
      out << format_full(fv.values[f]);
    }
    if (labeled) out << "," << signals.class_names[static_cast<std::size_t>(signals.labels[w])];
    out << "\n";
  }
}

}  // namespace lmknn
