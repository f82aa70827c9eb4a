#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace uwdiff {

// Percentile with linear interpolation at rank q * (n - 1), q in [0, 1].
// Takes its argument by value: the sort works on the copy.
inline double percentile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw std::invalid_argument("percentile: empty sample");
  }
  if (q < 0.0 || q > 1.0) {
    throw std::invalid_argument("percentile: q must lie in [0, 1]");
  }
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

// Mean with the lowest and highest floor(alpha * n) entries dropped.
inline double trimmed_mean(std::vector<double> values, double alpha) {
  if (values.empty()) {
    throw std::invalid_argument("trimmed_mean: empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t drop =
      static_cast<std::size_t>(alpha * static_cast<double>(values.size()));
  if (2 * drop >= values.size()) {
    throw std::invalid_argument("trimmed_mean: trim exceeds sample");
  }
  double acc = 0.0;
  for (std::size_t i = drop; i < values.size() - drop; ++i) acc += values[i];
  return acc / static_cast<double>(values.size() - 2 * drop);
}

}  // namespace uwdiff
