#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lmknn/dataset.hpp"
#include "lmknn/error.hpp"
#include "lmknn/rng.hpp"
#include "lmknn/signal_stats.hpp"

namespace lmknn {

/// Synthetic stand-in for the gearbox recordings: Gaussian background
/// plus a periodic decaying impulse train whose amplitude grows with the
/// class index, so higher classes get spikier (higher-kurtosis) windows.
struct SynthConfig {
  int classes = 7;
  int per_class = 60;
  int signal_length = 1024;
  double severity_step = 1.0;
  double noise = 0.5;
  std::uint64_t seed = 1;
};

struct SignalDataset {
  std::vector<Signal> windows;
  std::vector<int> labels;
  std::vector<std::string> class_names;
};

inline constexpr int kImpulsePeriod = 32;
inline constexpr int kImpulseRing = 8;

inline SignalDataset generate_dataset(const SynthConfig& config) {
  if (config.classes < 2) throw invalid_argument("generate_dataset: need >= 2 classes");
  if (config.per_class < 2) throw invalid_argument("generate_dataset: need >= 2 windows per class");
  if (config.signal_length < 64)
    throw invalid_argument("generate_dataset: signal_length must be >= 64");
  if (config.noise < 0.0 || config.severity_step < 0.0)
    throw invalid_argument("generate_dataset: noise and severity_step must be >= 0");

  SignalDataset out;
  out.class_names.reserve(static_cast<std::size_t>(config.classes));
  for (int c = 0; c < config.classes; ++c) out.class_names.push_back("c" + std::to_string(c));

  Rng rng(derive_seed(config.seed, 0x5e17d));
  for (int c = 0; c < config.classes; ++c) {
    const double amplitude = static_cast<double>(c) * config.severity_step;
    for (int w = 0; w < config.per_class; ++w) {
      Signal signal;
      signal.samples.resize(static_cast<std::size_t>(config.signal_length));
      for (double& s : signal.samples) s = config.noise * rng.normal();
      const int phase = static_cast<int>(rng.uniform_below(kImpulsePeriod));
      for (int p = phase; p < config.signal_length; p += kImpulsePeriod) {
        // AC-coupled burst: random polarity, exponential decay.
        const double burst = rng.uniform() < 0.5 ? amplitude : -amplitude;
        for (int s = 0; s < kImpulseRing && p + s < config.signal_length; ++s)
          signal.samples[static_cast<std::size_t>(p + s)] += burst * std::exp(-1.2 * s);
      }
      out.windows.push_back(std::move(signal));
      out.labels.push_back(c);
    }
  }
  return out;
}

/// Run the statistical feature extractor over every window.
inline Dataset extract_dataset(const SignalDataset& signals) {
  Dataset data;
  data.feature_names.assign(feature_names().begin(), feature_names().end());
  data.class_names = signals.class_names;
  data.instances.reserve(signals.windows.size());
  for (std::size_t i = 0; i < signals.windows.size(); ++i) {
    const FeatureVector fv = extract_features(signals.windows[i]);
    LabeledInstance inst;
    inst.x.assign(fv.values.begin(), fv.values.end());
    inst.label = signals.labels[i];
    data.instances.push_back(std::move(inst));
  }
  return data;
}

}  // namespace lmknn
