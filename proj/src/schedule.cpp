#include "uwdiff/schedule.hpp"

#include <stdexcept>
#include <string>

namespace uwdiff {

namespace {

void check_t(int t, int lo, int hi, const char* what) {
  if (t < lo || t > hi) {
    throw std::out_of_range(std::string(what) + ": timestep " +
                            std::to_string(t) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) +
                            "]");
  }
}

}  // namespace

NoiseSchedule NoiseSchedule::linear(int steps, double beta_start,
                                    double beta_end) {
  if (steps < 1) {
    throw std::invalid_argument("linear_schedule: steps must be >= 1");
  }
  if (!(beta_start > 0.0) || !(beta_end < 1.0) || beta_start > beta_end) {
    throw std::invalid_argument(
        "linear_schedule: need 0 < beta_start <= beta_end < 1");
  }
  NoiseSchedule s;
  s.beta_.resize(static_cast<std::size_t>(steps));
  s.alpha_.resize(static_cast<std::size_t>(steps));
  s.alpha_bar_.resize(static_cast<std::size_t>(steps));
  s.posterior_var_.resize(static_cast<std::size_t>(steps));
  double bar = 1.0;
  for (int t = 1; t <= steps; ++t) {
    const double frac =
        steps == 1 ? 0.0 : static_cast<double>(t - 1) / (steps - 1);
    const double beta = beta_start + (beta_end - beta_start) * frac;
    const double alpha = 1.0 - beta;
    const double bar_prev = bar;
    bar *= alpha;
    s.beta_[static_cast<std::size_t>(t - 1)] = beta;
    s.alpha_[static_cast<std::size_t>(t - 1)] = alpha;
    s.alpha_bar_[static_cast<std::size_t>(t - 1)] = bar;
    // beta_tilde_t = (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t) * beta_t;
    // the t = 1 boundary keeps the full beta_1.
    s.posterior_var_[static_cast<std::size_t>(t - 1)] =
        t == 1 ? beta : (1.0 - bar_prev) / (1.0 - bar) * beta;
  }
  return s;
}

double NoiseSchedule::beta(int t) const {
  check_t(t, 1, steps(), "beta");
  return beta_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha(int t) const {
  check_t(t, 1, steps(), "alpha");
  return alpha_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha_bar(int t) const {
  check_t(t, 0, steps(), "alpha_bar");
  return t == 0 ? 1.0 : alpha_bar_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::posterior_variance(int t) const {
  check_t(t, 1, steps(), "posterior_variance");
  return posterior_var_[static_cast<std::size_t>(t - 1)];
}

}  // namespace uwdiff
