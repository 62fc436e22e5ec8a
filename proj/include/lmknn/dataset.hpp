#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lmknn/error.hpp"

namespace lmknn {

/// One feature vector with its class id (index into Dataset::class_names).
struct LabeledInstance {
  std::vector<double> x;
  int label = -1;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<LabeledInstance> instances;

  std::size_t n_features() const { return feature_names.size(); }
  std::size_t n_classes() const { return class_names.size(); }
  std::size_t size() const { return instances.size(); }

  int feature_index(const std::string& name) const {
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    return it == feature_names.end() ? -1 : static_cast<int>(it - feature_names.begin());
  }

  int class_index(const std::string& name) const {
    const auto it = std::find(class_names.begin(), class_names.end(), name);
    return it == class_names.end() ? -1 : static_cast<int>(it - class_names.begin());
  }

  void validate() const {
    for (const auto& inst : instances) {
      if (inst.x.size() != feature_names.size())
        throw shape_error("instance has " + std::to_string(inst.x.size()) +
                          " values, dataset declares " + std::to_string(feature_names.size()));
      if (inst.label < 0 || inst.label >= static_cast<int>(class_names.size()))
        throw invalid_argument("instance label out of range");
      for (double v : inst.x)
        if (!std::isfinite(v)) throw invalid_argument("instance has a non-finite value");
    }
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (const auto& inst : instances) ++counts[static_cast<std::size_t>(inst.label)];
    return counts;
  }

  /// Restrict every instance to the named features, preserving this
  /// dataset's column order for names that appear in `keep`.
  Dataset project(const std::vector<std::string>& keep) const {
    std::vector<int> cols;
    Dataset out;
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
      if (std::find(keep.begin(), keep.end(), feature_names[i]) != keep.end()) {
        cols.push_back(static_cast<int>(i));
        out.feature_names.push_back(feature_names[i]);
      }
    }
    for (const auto& name : keep)
      if (feature_index(name) < 0)
        throw invalid_argument("unknown feature in projection: " + name);
    out.class_names = class_names;
    out.instances.reserve(instances.size());
    for (const auto& inst : instances) {
      LabeledInstance p;
      p.label = inst.label;
      p.x.reserve(cols.size());
      for (int c : cols) p.x.push_back(inst.x[static_cast<std::size_t>(c)]);
      out.instances.push_back(std::move(p));
    }
    return out;
  }
};

}  // namespace lmknn
