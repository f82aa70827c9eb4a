#pragma once

#include <cstddef>
#include <vector>

namespace uwdiff::par {

// Work sizes below this run serially; spawning a team costs more than the
// loop body for desk-sized images.
constexpr std::size_t kParallelCutoff = 1u << 15;

// Sum of f(row) over rows 0..rows-1. Partial terms are computed in parallel
// but combined serially in row order, so the result is bit-identical for any
// thread count. Every scalar reduction in the library funnels through here.
template <class F>
double row_sum(int rows, F&& f) {
  std::vector<double> partial(static_cast<std::size_t>(rows > 0 ? rows : 0));
#pragma omp parallel for schedule(static) if (rows > 8)
  for (int y = 0; y < rows; ++y) {
    partial[static_cast<std::size_t>(y)] = f(y);
  }
  double total = 0.0;
  for (int y = 0; y < rows; ++y) total += partial[static_cast<std::size_t>(y)];
  return total;
}

// Max of f(row) over rows, same determinism contract as row_sum.
template <class F>
double row_max(int rows, F&& f) {
  std::vector<double> partial(static_cast<std::size_t>(rows > 0 ? rows : 0));
#pragma omp parallel for schedule(static) if (rows > 8)
  for (int y = 0; y < rows; ++y) {
    partial[static_cast<std::size_t>(y)] = f(y);
  }
  double best = 0.0;
  for (int y = 0; y < rows; ++y) {
    if (y == 0 || partial[static_cast<std::size_t>(y)] > best) {
      best = partial[static_cast<std::size_t>(y)];
    }
  }
  return best;
}

}  // namespace uwdiff::par
