#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "lmknn/error.hpp"

namespace lmknn {

/// One recording window of raw amplitude samples.
struct Signal {
  std::vector<double> samples;

  Signal() = default;
  explicit Signal(std::vector<double> s) : samples(std::move(s)) {}

  std::size_t size() const { return samples.size(); }
};

enum class Feature : std::size_t {
  Mean = 0,
  StandardError,
  Median,
  Mode,
  StandardDeviation,
  SampleVariance,
  Kurtosis,
  Skewness,
  Range,
  Minimum,
  Maximum,
  Sum,
  Count,
};

inline constexpr std::size_t kFeatureCount = 13;

inline const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "mean",     "standard_error", "median",   "mode",    "standard_deviation",
      "sample_variance", "kurtosis", "skewness", "range",  "minimum",
      "maximum",  "sum",            "count"};
  return names;
}

/// The thirteen descriptive statistics of one window, in canonical order.
/// degenerate_moments marks a constant window whose kurtosis/skewness are
/// reported as 0 instead of failing the whole batch.
struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  bool degenerate_moments = false;

  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
};

namespace detail {

inline void require_finite(const Signal& signal) {
  for (double v : signal.samples)
    if (!std::isfinite(v)) throw invalid_argument("signal contains a non-finite sample");
}

inline double sum_of(const Signal& s) {
  double acc = 0.0;
  for (double v : s.samples) acc += v;
  return acc;
}

/// Centered second/third/fourth power sums in one pass.
struct CenteredSums {
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};

inline CenteredSums centered_sums(const Signal& s, double mean) {
  CenteredSums c;
  for (double v : s.samples) {
    const double d = v - mean;
    const double d2 = d * d;
    c.m2 += d2;
    c.m3 += d2 * d;
    c.m4 += d2 * d2;
  }
  return c;
}

}  // namespace detail

inline double mean(const Signal& signal) {
  if (signal.size() < 1) throw insufficient_samples("mean needs at least 1 sample");
  detail::require_finite(signal);
  return detail::sum_of(signal) / static_cast<double>(signal.size());
}

/// Sample variance, the spreadsheet VAR convention: Σ(x−x̄)²/(n−1).
inline double sample_variance(const Signal& signal) {
  const std::size_t n = signal.size();
  if (n < 2) throw insufficient_samples("sample_variance needs at least 2 samples");
  detail::require_finite(signal);
  const double m = detail::sum_of(signal) / static_cast<double>(n);
  return detail::centered_sums(signal, m).m2 / static_cast<double>(n - 1);
}

inline double standard_deviation(const Signal& signal) {
  if (signal.size() < 2)
    throw insufficient_samples("standard_deviation needs at least 2 samples");
  return std::sqrt(sample_variance(signal));
}

/// Excess kurtosis, the spreadsheet KURT convention:
/// n(n+1)/((n−1)(n−2)(n−3)) Σ((x−x̄)/s)⁴ − 3(n−1)²/((n−2)(n−3)).
inline double kurtosis(const Signal& signal) {
  const double n = static_cast<double>(signal.size());
  if (signal.size() < 4) throw insufficient_samples("kurtosis needs at least 4 samples");
  detail::require_finite(signal);
  const double m = detail::sum_of(signal) / n;
  const auto sums = detail::centered_sums(signal, m);
  const double s2 = sums.m2 / (n - 1.0);
  if (s2 <= 0.0) throw degenerate_signal("kurtosis undefined for a constant signal");
  const double z4 = sums.m4 / (s2 * s2);
  return n * (n + 1.0) / ((n - 1.0) * (n - 2.0) * (n - 3.0)) * z4 -
         3.0 * (n - 1.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
}

/// Skewness, the spreadsheet SKEW convention: n/((n−1)(n−2)) Σ((x−x̄)/s)³.
inline double skewness(const Signal& signal) {
  const double n = static_cast<double>(signal.size());
  if (signal.size() < 3) throw insufficient_samples("skewness needs at least 3 samples");
  detail::require_finite(signal);
  const double m = detail::sum_of(signal) / n;
  const auto sums = detail::centered_sums(signal, m);
  const double s2 = sums.m2 / (n - 1.0);
  if (s2 <= 0.0) throw degenerate_signal("skewness undefined for a constant signal");
  const double z3 = sums.m3 / (s2 * std::sqrt(s2));
  return n / ((n - 1.0) * (n - 2.0)) * z3;
}

/// Regression standard error of the sample values against their 0-based
/// index (the spreadsheet STEYX convention; the index is the only
/// regressor a bare signal carries).
inline double standard_error(const Signal& signal) {
  const std::size_t n = signal.size();
  if (n < 3) throw insufficient_samples("standard_error needs at least 3 samples");
  detail::require_finite(signal);
  const double nd = static_cast<double>(n);
  const double xbar = (nd - 1.0) / 2.0;
  const double ybar = detail::sum_of(signal) / nd;
  double syy = 0.0, sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - xbar;
    const double dy = signal.samples[i] - ybar;
    syy += dy * dy;
    sxy += dx * dy;
    sxx += dx * dx;
  }
  const double resid = syy - sxy * sxy / sxx;
  return std::sqrt(std::max(0.0, resid) / (nd - 2.0));
}

inline double median(const Signal& signal) {
  if (signal.size() < 1) throw insufficient_samples("median needs at least 1 sample");
  detail::require_finite(signal);
  std::vector<double> sorted = signal.samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

inline constexpr int kModeBins = 64;

/// Mode of a continuous signal: bin into 64 equal-width bins over
/// [min, max] and return the center of the most populated bin, leftmost
/// bin winning ties. A constant signal is its own mode.
inline double mode(const Signal& signal) {
  if (signal.size() < 1) throw insufficient_samples("mode needs at least 1 sample");
  detail::require_finite(signal);
  const auto [lo_it, hi_it] = std::minmax_element(signal.samples.begin(), signal.samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) return lo;
  const double width = (hi - lo) / kModeBins;
  std::array<int, kModeBins> counts{};
  for (double v : signal.samples) {
    int b = static_cast<int>((v - lo) / width);
    if (b >= kModeBins) b = kModeBins - 1;
    if (b < 0) b = 0;
    ++counts[b];
  }
  int best = 0;
  for (int b = 1; b < kModeBins; ++b)
    if (counts[b] > counts[best]) best = b;
  return lo + (best + 0.5) * width;
}

inline FeatureVector extract_features(const Signal& signal) {
  const std::size_t n = signal.size();
  if (n < 4) throw insufficient_samples("extract_features needs at least 4 samples");
  detail::require_finite(signal);

  FeatureVector fv;
  const double nd = static_cast<double>(n);
  const double total = detail::sum_of(signal);
  const double m = total / nd;
  const auto sums = detail::centered_sums(signal, m);
  const double var = sums.m2 / (nd - 1.0);
  const auto [lo_it, hi_it] = std::minmax_element(signal.samples.begin(), signal.samples.end());

  fv[Feature::Mean] = m;
  fv[Feature::StandardError] = standard_error(signal);
  fv[Feature::Median] = median(signal);
  fv[Feature::Mode] = mode(signal);
  fv[Feature::StandardDeviation] = std::sqrt(var);
  fv[Feature::SampleVariance] = var;
  if (var > 0.0) {
    fv[Feature::Kurtosis] = kurtosis(signal);
    fv[Feature::Skewness] = skewness(signal);
  } else {
    fv[Feature::Kurtosis] = 0.0;
    fv[Feature::Skewness] = 0.0;
    fv.degenerate_moments = true;
  }
  fv[Feature::Range] = *hi_it - *lo_it;
  fv[Feature::Minimum] = *lo_it;
  fv[Feature::Maximum] = *hi_it;
  fv[Feature::Sum] = total;
  fv[Feature::Count] = nd;
  return fv;
}

}  // namespace lmknn
