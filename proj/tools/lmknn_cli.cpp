// Command-line front end for the gearbox fault-diagnosis pipeline:
// synthetic signal generation, feature extraction, tree-based feature
// selection, metric training, classification, evaluation and sweeps.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmknn/decision_tree.hpp"
#include "lmknn/eval.hpp"
#include "lmknn/io.hpp"
#include "lmknn/knn.hpp"
#include "lmknn/lmnn.hpp"
#include "lmknn/synth.hpp"

namespace {

using lmknn::Dataset;
using lmknn::TrainConfig;

/// Expand `--config FILE` into argv tokens. The file holds key=value
/// lines ('#' starts a comment); keys given on the command line are not
/// injected, so explicit flags always win. On duplicate file keys the
/// last one counts.
std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
  std::string file;
  std::size_t subcommand_pos = std::string::npos;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (subcommand_pos == std::string::npos && !args[i].empty() && args[i][0] != '-')
      subcommand_pos = i;
    if (args[i] == "--config" && i + 1 < args.size())
      file = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      file = args[i].substr(9);
  }
  if (file.empty() || subcommand_pos == std::string::npos) return args;

  std::ifstream in(file);
  if (!in) throw lmknn::io_error("cannot open config file: " + file);

  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = lmknn::detail::trim(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw lmknn::io_error(file + ":" + std::to_string(line_no) + ": expected key=value");
    const std::string key = lmknn::detail::trim(trimmed.substr(0, eq));
    const std::string value = lmknn::detail::trim(trimmed.substr(eq + 1));
    std::erase_if(entries, [&](const auto& e) { return e.first == key; });
    entries.emplace_back(key, value);
  }

  std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(subcommand_pos) + 1);
  for (const auto& [key, value] : entries) {
    bool on_command_line = false;
    const std::string flag = "--" + key;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) on_command_line = true;
    if (on_command_line) continue;
    out.push_back(flag + "=" + value);
  }
  out.insert(out.end(), args.begin() + static_cast<long>(subcommand_pos) + 1, args.end());
  return out;
}

/// Parse "1,3,5" and "1..59" style grid lists (both forms may be mixed).
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    const std::size_t dots = token.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoi(token));
      continue;
    }
    const int lo = std::stoi(token.substr(0, dots));
    const int hi = std::stoi(token.substr(dots + 2));
    if (hi < lo) throw CLI::ValidationError("range `" + token + "` is descending");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("empty list");
  return out;
}

Dataset load_dataset(const std::string& path, const std::string& features_path) {
  Dataset data = lmknn::read_dataset_csv(path);
  if (!features_path.empty()) {
    const auto keep = lmknn::read_feature_list(features_path);
    data = data.project(keep);
  }
  return data;
}

void add_train_options(CLI::App* cmd, TrainConfig& config, bool with_k = true) {
  if (with_k)
    cmd->add_option("--k", config.k, "Neighbor count")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--mu", config.mu, "Hinge weight in (0,1)")->capture_default_str();
  cmd->add_option("--step", config.step, "Gradient step size")->capture_default_str();
  cmd->add_option("--iterations", config.max_iterations, "Projected gradient iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
  cmd->add_flag("--standardize", config.standardize,
                "z-score features on the training split before learning");
  cmd->add_flag("--unweighted-pull", config.unweighted_pull,
                "Unweighted pull term instead of the (1-mu) convex combination");
  cmd->add_flag("--knn-restricted-impostors", config.restrict_impostors,
                "Scan impostors only among each point's k nearest neighbors");
}

int run(int argc, char** argv) {
  CLI::App app{"Large-margin k-nearest-neighbor fault diagnosis pipeline"};
  app.require_subcommand(1);

  // --- synth -----------------------------------------------------------
  lmknn::SynthConfig synth_config;
  std::string synth_out = "signals.csv";
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled signal set");
  std::string config_file;
  synth->add_option("--config", config_file, "Optional key=value config file (command-line values win)");
  synth->add_option("--out", synth_out, "Output signal CSV")->capture_default_str();
  synth->add_option("--classes", synth_config.classes, "Fault classes")->check(CLI::Range(2, 1000))->capture_default_str();
  synth->add_option("--per-class", synth_config.per_class, "Windows per class")->check(CLI::Range(2, 1000000))->capture_default_str();
  synth->add_option("--length", synth_config.signal_length, "Samples per window")->check(CLI::Range(64, 10000000))->capture_default_str();
  synth->add_option("--severity-step", synth_config.severity_step, "Impulse amplitude per class step")->capture_default_str();
  synth->add_option("--noise", synth_config.noise, "Gaussian noise level")->capture_default_str();
  synth->add_option("--seed", synth_config.seed, "Random seed")->capture_default_str();

  // --- extract ---------------------------------------------------------
  std::string extract_in = "signals.csv";
  std::string extract_out = "features.csv";
  auto* extract = app.add_subcommand(
      "extract", "Compute the thirteen statistical features per window");
  extract->add_option("--config", config_file, "Optional key=value config file (command-line values win)");
  extract->add_option("--in", extract_in, "Signal CSV (one window per row) or plain text (one sample per line)")->capture_default_str();
  extract->add_option("--out", extract_out, "Output feature CSV")->capture_default_str();

  // --- select ----------------------------------------------------------
  std::string select_in = "features.csv";
  std::string select_out = "selected.txt";
  std::string select_tree_out = "tree.txt";
  int min_leaf = 2;
  auto* select = app.add_subcommand("select", "Gain-ratio tree feature selection");
  select->add_option("--config", config_file, "Optional key=value config file (command-line values win)");
  select->add_option("--in", select_in, "Labeled feature CSV")->capture_default_str();
  select->add_option("--out", select_out, "Selected feature list (one name per line)")->capture_default_str();
  select->add_option("--tree-out", select_tree_out, "Decision tree as indented text")->capture_default_str();
  select->add_option("--min-leaf", min_leaf, "Minimum instances per leaf")->check(CLI::PositiveNumber)->capture_default_str();

  // --- train -----------------------------------------------------------
  TrainConfig train_config;
  std::string train_in = "features.csv";
  std::string train_features;
  std::string train_out = "model.txt";
  auto* train = app.add_subcommand("train", "Learn the metric by projected gradient descent");
  train->add_option("--config", config_file, "Optional key=value config file (command-line values win)");
  train->add_option("--in", train_in, "Labeled feature CSV")->capture_default_str();
  train->add_option("--features", train_features, "Optional selected-feature list to project onto");
  train->add_option("--out", train_out, "Model file; training instances go to <out>.train.csv")->capture_default_str();
  add_train_options(train, train_config);

  // --- classify --------------------------------------------------------
  std::string classify_model = "model.txt";
  std::string classify_train;
  std::string classify_in = "queries.csv";
  std::string classify_out = "predictions.txt";
  std::string classify_weights = "weights.json";
  int classify_k = 0;  // 0 = use the model's k
  auto* classify_cmd = app.add_subcommand("classify", "Predict labels for query rows");
  classify_cmd->add_option("--config", config_file, "Optional key=value config file (command-line values win)");
  classify_cmd->add_option("--model", classify_model, "Model file from `train`")->capture_default_str();
  classify_cmd->add_option("--train-data", classify_train, "Training CSV (default: <model>.train.csv)");
  classify_cmd->add_option("--in", classify_in, "Query CSV with the model's feature columns")->capture_default_str();
  classify_cmd->add_option("--out", classify_out, "One predicted label per row")->capture_default_str();
  classify_cmd->add_option("--weights-out", classify_weights, "Per-class weights JSON sidecar")->capture_default_str();
  classify_cmd->add_option("--k", classify_k, "Override the model's neighbor count")->check(CLI::PositiveNumber);

  // --- evaluate --------------------------------------------------------
  TrainConfig eval_config;
  std::string eval_in = "features.csv";
  std::string eval_features;
  std::string eval_out = "report.json";
  int test_per_class = 50;
  bool eval_total = false;
  std::uint64_t eval_seed = 1;
  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Random sub-sampling split, train, classify, report");
  evaluate_cmd->add_option("--config", config_file, "Optional key=value config file (command-line values win)");
  evaluate_cmd->add_option("--in", eval_in, "Labeled feature CSV")->capture_default_str();
  evaluate_cmd->add_option("--features", eval_features, "Optional selected-feature list");
  evaluate_cmd->add_option("--out", eval_out, "JSON report path")->capture_default_str();
  evaluate_cmd->add_option("--test-per-class", test_per_class, "Held-out instances per class")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate_cmd->add_flag("--total-test-size", eval_total,
                         "Treat the test size as a whole-dataset count instead of per class");
  evaluate_cmd->add_option("--split-seed", eval_seed, "Seed for the split")->capture_default_str();
  add_train_options(evaluate_cmd, eval_config);

  // --- sweep -----------------------------------------------------------
  TrainConfig sweep_config;
  std::string sweep_in = "features.csv";
  std::string sweep_features;
  std::string sweep_out = "sweep.csv";
  std::string sweep_summary_out = "sweep_summary.csv";
  std::string sweep_ks = "1";
  std::string sweep_sizes = "1..59";
  int trials = 10;
  bool sweep_total = false;
  std::uint64_t sweep_seed = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy grid over k and test-set size");
  sweep_cmd->add_option("--config", config_file, "Optional key=value config file (command-line values win)");
  sweep_cmd->add_option("--in", sweep_in, "Labeled feature CSV")->capture_default_str();
  sweep_cmd->add_option("--features", sweep_features, "Optional selected-feature list");
  sweep_cmd->add_option("--out", sweep_out, "Per-trial grid CSV")->capture_default_str();
  sweep_cmd->add_option("--summary-out", sweep_summary_out, "Per-cell mean/stddev CSV")->capture_default_str();
  sweep_cmd->add_option("--k", sweep_ks, "k values, e.g. 1,3,5")->capture_default_str();
  sweep_cmd->add_option("--test-sizes", sweep_sizes, "Test sizes per class, e.g. 1..59")->capture_default_str();
  sweep_cmd->add_option("--trials", trials, "Trials per grid cell")->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_flag("--total-test-size", sweep_total,
                      "Treat test sizes as whole-dataset counts instead of per class");
  sweep_cmd->add_option("--split-seed", sweep_seed, "Master seed for the grid")->capture_default_str();
  add_train_options(sweep_cmd, sweep_config, /*with_k=*/false);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config_args(args);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  if (synth->parsed()) {
    const auto signals = lmknn::generate_dataset(synth_config);
    lmknn::write_signals_csv(synth_out, signals);
    std::cout << signals.windows.size() << " windows (" << synth_config.classes << " classes x "
              << synth_config.per_class << ") -> " << synth_out << "\n";
    return 0;
  }

  if (extract->parsed()) {
    const auto signals = lmknn::read_signals(extract_in);
    lmknn::write_features_csv(extract_out, signals);
    std::cout << signals.windows.size() << " windows -> " << extract_out << "\n";
    return 0;
  }

  if (select->parsed()) {
    const Dataset data = lmknn::read_dataset_csv(select_in);
    const lmknn::DecisionTree tree = lmknn::build_tree(data, min_leaf);
    const auto selected = lmknn::select_features(tree);
    {
      auto out = lmknn::detail::open_output(select_tree_out);
      tree.print(out);
    }
    lmknn::write_feature_list(select_out, selected);
    std::cout << "selected " << selected.size() << "/" << data.n_features() << " features -> "
              << select_out << " (tree: " << select_tree_out << ")\n";
    return 0;
  }

  if (train->parsed()) {
    const Dataset data = load_dataset(train_in, train_features);
    lmknn::Model model;
    model.metric = lmknn::train_metric(data.instances, train_config, data.feature_names);
    model.class_names = data.class_names;
    model.config = train_config;
    lmknn::save_model(train_out, model);
    const std::string train_csv = train_out + ".train.csv";
    lmknn::write_dataset_csv(train_csv, data);
    std::cout << "metric over " << data.n_features() << " features, " << data.size()
              << " instances -> " << train_out << " (+ " << train_csv << ")\n";
    return 0;
  }

  if (classify_cmd->parsed()) {
    const lmknn::Model model = lmknn::load_model(classify_model);
    const std::string train_csv =
        classify_train.empty() ? classify_model + ".train.csv" : classify_train;
    Dataset train_data = lmknn::read_dataset_csv(train_csv);
    if (train_data.feature_names != model.metric.feature_names)
      train_data = train_data.project(model.metric.feature_names);
    const auto queries = lmknn::read_queries_csv(classify_in, model.metric.feature_names);

    const int k = classify_k > 0 ? classify_k : model.config.k;
    nlohmann::json sidecar;
    sidecar["classes"] = train_data.class_names;
    sidecar["predictions"] = nlohmann::json::array();
    auto out = lmknn::detail::open_output(classify_out);
    for (const auto& q : queries) {
      const lmknn::Prediction p =
          lmknn::classify(model.metric, train_data.instances, train_data.n_classes(), q, k);
      const std::string& label = train_data.class_names[static_cast<std::size_t>(p.label)];
      out << label << "\n";
      nlohmann::json entry;
      entry["label"] = label;
      entry["weights"] = p.weights;
      sidecar["predictions"].push_back(entry);
    }
    {
      auto wout = lmknn::detail::open_output(classify_weights);
      wout << sidecar.dump(2) << "\n";
    }
    std::cout << queries.size() << " queries -> " << classify_out << " (weights: "
              << classify_weights << ")\n";
    return 0;
  }

  if (evaluate_cmd->parsed()) {
    const Dataset data = load_dataset(eval_in, eval_features);
    auto [train_split, test_split] =
        eval_total ? lmknn::random_subsample_split_total(data, test_per_class, eval_seed)
                   : lmknn::random_subsample_split(data, test_per_class, eval_seed);
    lmknn::EvalReport report = lmknn::evaluate(train_split, test_split, eval_config);
    report.test_per_class = test_per_class;
    report.split_seed = eval_seed;
    lmknn::write_report_json(eval_out, report);
    std::cout << "accuracy " << report.accuracy << " (" << report.confusion.diagonal() << "/"
              << report.confusion.total() << ") -> " << eval_out << "\n";
    return 0;
  }

  if (sweep_cmd->parsed()) {
    const Dataset data = load_dataset(sweep_in, sweep_features);
    const auto ks = parse_int_list(sweep_ks);
    const auto sizes = parse_int_list(sweep_sizes);
    const lmknn::SweepResult result =
        lmknn::sweep(data, ks, sizes, trials, sweep_seed, sweep_config, sweep_total);
    lmknn::write_sweep_cells_csv(sweep_out, result);
    lmknn::write_sweep_summary_csv(sweep_summary_out, result);
    std::cout << result.cells.size() << " grid rows -> " << sweep_out << " (summary: "
              << sweep_summary_out << ")\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lmknn::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const lmknn::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
