#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "lmknn/dataset.hpp"
#include "lmknn/error.hpp"
#include "lmknn/lmnn.hpp"

namespace lmknn {

/// A neighbor closer than this counts as an exact match and decides the
/// vote outright (the limit of 1/d weighting).
inline constexpr double kCoincidenceThreshold = 1e-12;

struct Prediction {
  int label = -1;
  std::vector<double> weights;  // per class id, all finite
  std::vector<int> neighbors;   // the k training indices used, nearest first
};

/// Indices of the k nearest training points under the metric, ascending
/// by distance, ties toward the lower index.
inline std::vector<int> k_nearest(const Matrix& m, const std::vector<LabeledInstance>& train,
                                  const std::vector<double>& query, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > train.size())
    throw invalid_argument("k_nearest: k must lie in [1, |train|]");
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    ranked.emplace_back(squared_distance(m, query, train[i].x), static_cast<int>(i));
  std::sort(ranked.begin(), ranked.end());
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = ranked[static_cast<std::size_t>(i)].second;
  return out;
}

inline std::vector<int> k_nearest(const Metric& metric, const std::vector<LabeledInstance>& train,
                                  const std::vector<double>& query, int k) {
  return k_nearest(metric.m, train, query, k);
}

/// Inverse-squared-distance weighted vote over the k nearest neighbors.
/// A coincident neighbor (d below kCoincidenceThreshold) short-circuits
/// the vote and returns its own class; with several coincident neighbors
/// the lowest training index wins.
inline Prediction classify(const Matrix& m, const std::vector<LabeledInstance>& train,
                           std::size_t n_classes, const std::vector<double>& query, int k) {
  Prediction p;
  p.neighbors = k_nearest(m, train, query, k);
  p.weights.assign(n_classes, 0.0);

  int coincident = -1;
  for (int idx : p.neighbors) {
    const double d = squared_distance(m, query, train[static_cast<std::size_t>(idx)].x);
    if (d < kCoincidenceThreshold) {
      if (coincident < 0 || idx < coincident) coincident = idx;
    }
  }
  if (coincident >= 0) {
    p.label = train[static_cast<std::size_t>(coincident)].label;
    p.weights[static_cast<std::size_t>(p.label)] = 1.0;
    return p;
  }

  for (int idx : p.neighbors) {
    const auto& neighbor = train[static_cast<std::size_t>(idx)];
    const double d = squared_distance(m, query, neighbor.x);
    p.weights[static_cast<std::size_t>(neighbor.label)] += 1.0 / d;
  }
  p.label = 0;
  for (std::size_t c = 1; c < n_classes; ++c)
    if (p.weights[c] > p.weights[static_cast<std::size_t>(p.label)]) p.label = static_cast<int>(c);
  return p;
}

inline Prediction classify(const Metric& metric, const std::vector<LabeledInstance>& train,
                           std::size_t n_classes, const std::vector<double>& query, int k) {
  return classify(metric.m, train, n_classes, query, k);
}

}  // namespace lmknn
