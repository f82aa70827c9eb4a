#pragma once

#include <vector>

#include "uwdiff/image.hpp"

namespace uwdiff {

// Variance schedule for the forward noising chain. Timesteps are 1-based:
// beta(1) is the first noising step, alpha_bar(0) == 1 is the clean data.
class NoiseSchedule {
 public:
  // beta_t linearly interpolates [beta_start, beta_end] over steps entries;
  // steps == 1 yields just beta_start. Requires 0 < beta_start <= beta_end < 1.
  static NoiseSchedule linear(int steps, double beta_start = 1e-4,
                              double beta_end = 0.02);

  int steps() const { return static_cast<int>(beta_.size()); }

  double beta(int t) const;           // t in [1, steps]
  double alpha(int t) const;          // 1 - beta(t)
  double alpha_bar(int t) const;      // t in [0, steps], prod of alphas
  double posterior_variance(int t) const;  // beta_tilde; t == 1 gives beta(1)

 private:
  std::vector<double> beta_, alpha_, alpha_bar_, posterior_var_;
};

inline NoiseSchedule linear_schedule(int steps, double beta_start = 1e-4,
                                     double beta_end = 0.02) {
  return NoiseSchedule::linear(steps, beta_start, beta_end);
}

}  // namespace uwdiff
