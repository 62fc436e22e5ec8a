// Spreadsheet-convention statistics oracle for tests: raw-moment
// formulas evaluated in long double, deliberately a different
// computational route than the library's centered two-pass code.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace stats_oracle {

inline long double sum(const std::vector<double>& x) {
  long double s = 0;
  for (double v : x) s += v;
  return s;
}

inline long double mean(const std::vector<double>& x) {
  return sum(x) / static_cast<long double>(x.size());
}

inline long double stdev(const std::vector<double>& x) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sxx = 0;
  for (double v : x) {
    sx += v;
    sxx += static_cast<long double>(v) * v;
  }
  return sqrtl((n * sxx - sx * sx) / (n * (n - 1)));
}

inline long double variance(const std::vector<double>& x) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sxx = 0;
  for (double v : x) {
    sx += v;
    sxx += static_cast<long double>(v) * v;
  }
  return (n * sxx - sx * sx) / (n * (n - 1));
}

inline long double kurt(const std::vector<double>& x) {
  const long double n = static_cast<long double>(x.size());
  const long double m = mean(x);
  const long double s = stdev(x);
  long double z4 = 0;
  for (double v : x) z4 += powl((v - m) / s, 4);
  return n * (n + 1) / ((n - 1) * (n - 2) * (n - 3)) * z4 -
         3 * (n - 1) * (n - 1) / ((n - 2) * (n - 3));
}

inline long double skew(const std::vector<double>& x) {
  const long double n = static_cast<long double>(x.size());
  const long double m = mean(x);
  const long double s = stdev(x);
  long double z3 = 0;
  for (double v : x) z3 += powl((v - m) / s, 3);
  return n / ((n - 1) * (n - 2)) * z3;
}

inline long double steyx(const std::vector<double>& y) {
  const long double n = static_cast<long double>(y.size());
  const long double xbar = (n - 1) / 2;
  const long double ybar = mean(y);
  long double syy = 0, sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const long double dx = static_cast<long double>(i) - xbar;
    const long double dy = y[i] - ybar;
    syy += dy * dy;
    sxy += dx * dy;
    sxx += dx * dx;
  }
  return sqrtl((syy - sxy * sxy / sxx) / (n - 2));
}

inline double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

inline double mode(const std::vector<double>& x) {
  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());
  if (lo == hi) return lo;
  const double w = (hi - lo) / 64;
  std::array<int, 64> bins{};
  for (double v : x) bins[std::min<int>(63, std::max<int>(0, static_cast<int>((v - lo) / w)))]++;
  int best = 0;
  for (int b = 1; b < 64; ++b)
    if (bins[b] > bins[best]) best = b;
  return lo + (best + 0.5) * w;
}

/// All thirteen statistics in the library's canonical order.
inline std::array<double, 13> all(const std::vector<double>& x) {
  return {static_cast<double>(mean(x)),
          static_cast<double>(steyx(x)),
          median(x),
          mode(x),
          static_cast<double>(stdev(x)),
          static_cast<double>(variance(x)),
          static_cast<double>(kurt(x)),
          static_cast<double>(skew(x)),
          *std::max_element(x.begin(), x.end()) - *std::min_element(x.begin(), x.end()),
          *std::min_element(x.begin(), x.end()),
          *std::max_element(x.begin(), x.end()),
          static_cast<double>(sum(x)),
          static_cast<double>(x.size())};
}

}  // namespace stats_oracle
