#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "lmknn/dataset.hpp"
#include "lmknn/error.hpp"

namespace lmknn {

/// Binary gain-ratio tree over numeric features. Instances with value
/// <= threshold follow the left branch.
struct DecisionTree {
  struct Node {
    int feature = -1;  // column index; -1 marks a leaf
    std::string feature_name;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int label = -1;          // leaf majority class
    std::size_t count = 0;   // instances that reached the leaf
    bool is_leaf() const { return feature < 0; }
  };

  std::vector<Node> nodes;  // nodes[0] is the root
  std::vector<std::string> class_names;

  bool empty() const { return nodes.empty(); }

  std::size_t interior_count() const {
    std::size_t c = 0;
    for (const auto& n : nodes)
      if (!n.is_leaf()) ++c;
    return c;
  }

  int predict(const std::vector<double>& x) const {
    if (nodes.empty()) throw invalid_argument("predict on an empty tree");
    int idx = 0;
    while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
      const Node& n = nodes[static_cast<std::size_t>(idx)];
      idx = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(idx)].label;
  }

  void print(std::ostream& os) const {
    if (!nodes.empty()) print_node(os, 0, 0);
  }

private:
  void print_node(std::ostream& os, int idx, int depth) const {
    const Node& n = nodes[static_cast<std::size_t>(idx)];
    std::string indent;
    for (int d = 0; d < depth; ++d) indent += "|   ";
    if (n.is_leaf()) {
      os << indent << class_names[static_cast<std::size_t>(n.label)] << " (" << n.count
         << ")\n";
      return;
    }
    const auto old_precision = os.precision(12);
    os << indent << n.feature_name << " <= " << n.threshold << "\n";
    print_node(os, n.left, depth + 1);
    os << indent << n.feature_name << " > " << n.threshold << "\n";
    print_node(os, n.right, depth + 1);
    os.precision(old_precision);
  }
};

namespace detail {

inline double entropy_bits(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

struct SplitScore {
  double gain = 0.0;
  double ratio = 0.0;
};

inline SplitScore score_split(const std::vector<std::size_t>& left,
                              const std::vector<std::size_t>& right) {
  std::size_t n_left = 0, n_right = 0;
  for (std::size_t c : left) n_left += c;
  for (std::size_t c : right) n_right += c;
  const std::size_t n = n_left + n_right;
  if (n_left == 0 || n_right == 0)
    throw invalid_split("split leaves one side empty");

  std::vector<std::size_t> parent(left.size());
  for (std::size_t k = 0; k < left.size(); ++k) parent[k] = left[k] + right[k];

  const double pl = static_cast<double>(n_left) / static_cast<double>(n);
  const double pr = static_cast<double>(n_right) / static_cast<double>(n);
  SplitScore s;
  s.gain = entropy_bits(parent, n) - pl * entropy_bits(left, n_left) -
           pr * entropy_bits(right, n_right);
  if (s.gain <= 0.0) {
    s.gain = std::max(s.gain, 0.0);
    s.ratio = 0.0;
    return s;
  }
  const double split_info = -pl * std::log2(pl) - pr * std::log2(pr);
  s.ratio = s.gain / split_info;
  return s;
}

}  // namespace detail

/// Gain ratio of the binary split `feature <= threshold` in bits.
inline double gain_ratio(const Dataset& dataset, const std::string& feature,
                         double threshold) {
  const int col = dataset.feature_index(feature);
  if (col < 0) throw invalid_argument("unknown feature: " + feature);
  std::vector<std::size_t> left(dataset.n_classes(), 0), right(dataset.n_classes(), 0);
  for (const auto& inst : dataset.instances) {
    auto& side = inst.x[static_cast<std::size_t>(col)] <= threshold ? left : right;
    ++side[static_cast<std::size_t>(inst.label)];
  }
  return detail::score_split(left, right).ratio;
}

namespace detail {

struct CandidateSplit {
  int feature = -1;
  double threshold = 0.0;
  double ratio = -1.0;
  bool found = false;
};

/// Best positive-gain split for the given rows, ties resolved toward
/// lower feature index then lower threshold (strict > keeps the first).
inline CandidateSplit best_split(const Dataset& data, const std::vector<int>& rows) {
  const std::size_t n_classes = data.n_classes();
  CandidateSplit best;

  std::vector<std::pair<double, int>> column(rows.size());
  for (std::size_t f = 0; f < data.n_features(); ++f) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& inst = data.instances[static_cast<std::size_t>(rows[r])];
      column[r] = {inst.x[f], inst.label};
    }
    std::sort(column.begin(), column.end());

    std::vector<std::size_t> left(n_classes, 0), right(n_classes, 0);
    for (const auto& [v, y] : column) ++right[static_cast<std::size_t>(y)];

    for (std::size_t r = 0; r + 1 < column.size(); ++r) {
      ++left[static_cast<std::size_t>(column[r].second)];
      --right[static_cast<std::size_t>(column[r].second)];
      if (column[r].first == column[r + 1].first) continue;
      const double threshold = column[r].first + 0.5 * (column[r + 1].first - column[r].first);
      const SplitScore s = score_split(left, right);
      if (s.gain <= 1e-12) continue;
      if (s.ratio > best.ratio) {
        best.feature = static_cast<int>(f);
        best.threshold = threshold;
        best.ratio = s.ratio;
        best.found = true;
      }
    }
  }
  return best;
}

inline int majority_label(const Dataset& data, const std::vector<int>& rows) {
  std::vector<std::size_t> counts(data.n_classes(), 0);
  for (int r : rows) ++counts[static_cast<std::size_t>(data.instances[static_cast<std::size_t>(r)].label)];
  int best = 0;
  for (std::size_t k = 1; k < counts.size(); ++k)
    if (counts[k] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  return best;
}

inline bool is_pure(const Dataset& data, const std::vector<int>& rows) {
  for (std::size_t r = 1; r < rows.size(); ++r)
    if (data.instances[static_cast<std::size_t>(rows[r])].label !=
        data.instances[static_cast<std::size_t>(rows[0])].label)
      return false;
  return true;
}

inline int grow(DecisionTree& tree, const Dataset& data, const std::vector<int>& rows,
                int min_leaf) {
  const int idx = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  const bool splittable = rows.size() >= 2 * static_cast<std::size_t>(min_leaf) &&
                          !is_pure(data, rows);
  CandidateSplit split;
  if (splittable) split = best_split(data, rows);

  if (!splittable || !split.found) {
    DecisionTree::Node& leaf = tree.nodes[static_cast<std::size_t>(idx)];
    leaf.label = majority_label(data, rows);
    leaf.count = rows.size();
    return idx;
  }

  std::vector<int> left_rows, right_rows;
  for (int r : rows) {
    const auto& inst = data.instances[static_cast<std::size_t>(r)];
    (inst.x[static_cast<std::size_t>(split.feature)] <= split.threshold ? left_rows
                                                                        : right_rows)
        .push_back(r);
  }

  tree.nodes[static_cast<std::size_t>(idx)].feature = split.feature;
  tree.nodes[static_cast<std::size_t>(idx)].feature_name =
      data.feature_names[static_cast<std::size_t>(split.feature)];
  tree.nodes[static_cast<std::size_t>(idx)].threshold = split.threshold;
  const int left = grow(tree, data, left_rows, min_leaf);
  const int right = grow(tree, data, right_rows, min_leaf);
  tree.nodes[static_cast<std::size_t>(idx)].left = left;
  tree.nodes[static_cast<std::size_t>(idx)].right = right;
  return idx;
}

}  // namespace detail

inline DecisionTree build_tree(const Dataset& dataset, int min_leaf = 2) {
  if (dataset.instances.empty()) throw invalid_argument("build_tree on an empty dataset");
  if (min_leaf < 1) throw invalid_argument("min_leaf must be positive");
  dataset.validate();

  DecisionTree tree;
  tree.class_names = dataset.class_names;
  std::vector<int> rows(dataset.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
  detail::grow(tree, dataset, rows, min_leaf);
  return tree;
}

/// Distinct feature names of all interior nodes, in first-visit
/// (pre-order) order. A single-leaf tree selects nothing.
inline std::vector<std::string> select_features(const DecisionTree& tree) {
  std::vector<std::string> out;
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) continue;
    if (std::find(out.begin(), out.end(), n.feature_name) == out.end())
      out.push_back(n.feature_name);
  }
  return out;
}

}  // namespace lmknn
