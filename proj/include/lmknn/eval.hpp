#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lmknn/dataset.hpp"
#include "lmknn/error.hpp"
#include "lmknn/knn.hpp"
#include "lmknn/lmnn.hpp"
#include "lmknn/rng.hpp"

namespace lmknn {

/// Per-class count table; rows are actual classes, columns predicted.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<long long>> counts;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> class_labels)
      : labels(std::move(class_labels)),
        counts(labels.size(), std::vector<long long>(labels.size(), 0)) {}

  void add(int actual, int predicted, long long n = 1) {
    counts[static_cast<std::size_t>(actual)][static_cast<std::size_t>(predicted)] += n;
  }

  long long total() const {
    long long t = 0;
    for (const auto& row : counts)
      for (long long c : row) t += c;
    return t;
  }

  long long diagonal() const {
    long long t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
  }

  double accuracy() const {
    const long long n = total();
    if (n == 0) throw invalid_argument("accuracy of an empty confusion matrix");
    return static_cast<double>(diagonal()) / static_cast<double>(n);
  }

  std::vector<long long> row_sums() const {
    std::vector<long long> sums(counts.size(), 0);
    for (std::size_t i = 0; i < counts.size(); ++i)
      for (long long c : counts[i]) sums[i] += c;
    return sums;
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    if (o.labels != labels) throw invalid_argument("confusion matrices over different labels");
    for (std::size_t i = 0; i < counts.size(); ++i)
      for (std::size_t j = 0; j < counts.size(); ++j) counts[i][j] += o.counts[i][j];
    return *this;
  }
};

struct EvalReport {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
  TrainConfig config;
  int test_per_class = 0;
  std::uint64_t split_seed = 0;
};

/// Draw test_per_class instances per class uniformly without replacement;
/// the remainder becomes the training split. Same seed, same split.
inline std::pair<Dataset, Dataset> random_subsample_split(const Dataset& dataset,
                                                          int test_per_class,
                                                          std::uint64_t seed) {
  if (test_per_class < 0) throw invalid_argument("test_per_class must be >= 0");
  dataset.validate();
  const auto counts = dataset.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] <= static_cast<std::size_t>(test_per_class))
      throw insufficient_class_size("class " + dataset.class_names[c] + " has only " +
                                    std::to_string(counts[c]) + " instances, cannot hold out " +
                                    std::to_string(test_per_class));

  Rng rng(derive_seed(seed, 0x5b117ULL));
  std::vector<bool> in_test(dataset.size(), false);
  for (std::size_t c = 0; c < dataset.n_classes(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.size(); ++i)
      if (dataset.instances[i].label == static_cast<int>(c)) members.push_back(i);
    const auto picks =
        rng.sample_without_replacement(static_cast<std::size_t>(test_per_class), members.size());
    for (std::size_t p : picks) in_test[members[p]] = true;
  }

  Dataset train, test;
  train.feature_names = test.feature_names = dataset.feature_names;
  train.class_names = test.class_names = dataset.class_names;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    (in_test[i] ? test : train).instances.push_back(dataset.instances[i]);
  return {std::move(train), std::move(test)};
}

/// Total-count variant: draw test_total instances uniformly from the
/// whole dataset, ignoring class boundaries.
inline std::pair<Dataset, Dataset> random_subsample_split_total(const Dataset& dataset,
                                                                int test_total,
                                                                std::uint64_t seed) {
  if (test_total < 0) throw invalid_argument("test_total must be >= 0");
  if (static_cast<std::size_t>(test_total) >= dataset.size())
    throw insufficient_class_size("cannot hold out " + std::to_string(test_total) + " of " +
                                  std::to_string(dataset.size()) + " instances");
  dataset.validate();

  Rng rng(derive_seed(seed, 0x707a1ULL));
  const auto picks =
      rng.sample_without_replacement(static_cast<std::size_t>(test_total), dataset.size());
  std::vector<bool> in_test(dataset.size(), false);
  for (std::size_t p : picks) in_test[p] = true;

  Dataset train, test;
  train.feature_names = test.feature_names = dataset.feature_names;
  train.class_names = test.class_names = dataset.class_names;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    (in_test[i] ? test : train).instances.push_back(dataset.instances[i]);
  return {std::move(train), std::move(test)};
}

/// Train a metric on the training split and score every test instance.
inline EvalReport evaluate(const Dataset& train, const Dataset& test,
                           const TrainConfig& config) {
  if (train.feature_names != test.feature_names)
    throw invalid_argument("evaluate: train and test feature names differ");
  if (train.class_names != test.class_names)
    throw invalid_argument("evaluate: train and test class sets differ");
  if (test.instances.empty()) throw invalid_argument("evaluate: empty test set");

  const Metric metric = train_metric(train.instances, config, train.feature_names);

  EvalReport report;
  report.config = config;
  report.confusion = ConfusionMatrix(train.class_names);
  const int k = std::min<int>(config.k, static_cast<int>(train.size()));
  for (const auto& inst : test.instances) {
    const Prediction p = classify(metric, train.instances, train.n_classes(), inst.x, k);
    report.confusion.add(inst.label, p.label);
  }
  report.accuracy = report.confusion.accuracy();
  return report;
}

struct SweepCell {
  int k = 0;
  int test_size = 0;
  int trial = 0;
  double accuracy = 0.0;
};

struct SweepSummary {
  int k = 0;
  int test_size = 0;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;       // one row per (k, test_size, trial)
  std::vector<SweepSummary> summary;  // one row per (k, test_size)
};

/// Accuracy over the (k × test_size × trial) grid with per-cell derived
/// seeds; deterministic given the master seed. Test sizes are per class
/// by default; total_test_size switches to whole-dataset counts.
inline SweepResult sweep(const Dataset& dataset, const std::vector<int>& k_values,
                         const std::vector<int>& test_sizes, int trials, std::uint64_t seed,
                         const TrainConfig& base_config = {}, bool total_test_size = false) {
  if (k_values.empty() || test_sizes.empty()) throw invalid_argument("sweep: empty grid");
  if (trials < 1) throw invalid_argument("sweep: trials must be >= 1");

  SweepResult result;
  for (int k : k_values) {
    for (int test_size : test_sizes) {
      double sum = 0.0, sum_sq = 0.0;
      for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t cell_seed =
            derive_seed(seed, static_cast<std::uint64_t>(k),
                        static_cast<std::uint64_t>(test_size), static_cast<std::uint64_t>(trial));
        auto [train, test] = total_test_size
                                 ? random_subsample_split_total(dataset, test_size, cell_seed)
                                 : random_subsample_split(dataset, test_size, cell_seed);
        TrainConfig config = base_config;
        config.k = k;
        config.seed = cell_seed;
        const EvalReport report = evaluate(train, test, config);
        result.cells.push_back({k, test_size, trial, report.accuracy});
        sum += report.accuracy;
        sum_sq += report.accuracy * report.accuracy;
      }
      const double n = static_cast<double>(trials);
      const double mean = sum / n;
      const double var = std::max(0.0, sum_sq / n - mean * mean);
      result.summary.push_back({k, test_size, mean, std::sqrt(var)});
    }
  }
  return result;
}

}  // namespace lmknn
