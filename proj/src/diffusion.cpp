#include "uwdiff/diffusion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "uwdiff/parallel.hpp"

namespace uwdiff {

namespace {

void check_step(int t, const NoiseSchedule& sched, const char* what) {
  if (t < 1 || t > sched.steps()) {
    throw std::out_of_range(std::string(what) + ": timestep " +
                            std::to_string(t) + " outside [1, " +
                            std::to_string(sched.steps()) + "]");
  }
}

}  // namespace

Image forward_sample(const Image& x0, int t, const Image& eps,
                     const NoiseSchedule& sched) {
  check_step(t, sched, "forward_sample");
  require_same_shape(x0, eps, "forward_sample");
  const double ab = sched.alpha_bar(t);
  const double a = std::sqrt(ab);
  const double b = std::sqrt(1.0 - ab);
  Image out(x0.height(), x0.width(), x0.channels(), Domain::LatentSigned);
  const std::size_t n = x0.size();
#pragma omp parallel for schedule(static) if (n >= par::kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const std::size_t j = static_cast<std::size_t>(i);
    out[j] = a * x0[j] + b * eps[j];
  }
  return out;
}

Image predict_x0(const Image& x_t, const Image& eps_hat, int t,
                 const NoiseSchedule& sched) {
  check_step(t, sched, "predict_x0");
  require_same_shape(x_t, eps_hat, "predict_x0");
  const double ab = sched.alpha_bar(t);
  const double inv_a = 1.0 / std::sqrt(ab);
  const double b = std::sqrt(1.0 - ab) * inv_a;
  Image out(x_t.height(), x_t.width(), x_t.channels(), Domain::LatentSigned);
  const std::size_t n = x_t.size();
#pragma omp parallel for schedule(static) if (n >= par::kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const std::size_t j = static_cast<std::size_t>(i);
    out[j] = inv_a * x_t[j] - b * eps_hat[j];
  }
  return out;
}

ReverseStepDistribution reverse_distribution_from_eps(
    const Image& x_t, const Image& eps_hat, int t, VariancePolicy policy,
    const NoiseSchedule& sched) {
  check_step(t, sched, "reverse_distribution");
  require_same_shape(x_t, eps_hat, "reverse_distribution (predictor output)");

  const double beta = sched.beta(t);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha(t));
  const double coef = beta / std::sqrt(1.0 - sched.alpha_bar(t));

  ReverseStepDistribution dist;
  dist.mu = Image(x_t.height(), x_t.width(), x_t.channels(), x_t.domain());
  const std::size_t n = x_t.size();
#pragma omp parallel for schedule(static) if (n >= par::kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const std::size_t j = static_cast<std::size_t>(i);
    dist.mu[j] = inv_sqrt_alpha * (x_t[j] - coef * eps_hat[j]);
  }
  dist.sigma2 = policy == VariancePolicy::FixedBeta
                    ? beta
                    : sched.posterior_variance(t);
  return dist;
}

ReverseStepDistribution reverse_distribution(const Image& x_t, int t,
                                             const NoisePredictor& predictor,
                                             const NoiseSchedule& sched) {
  check_step(t, sched, "reverse_distribution");
  return reverse_distribution_from_eps(x_t, predictor.predict(x_t, t), t,
                                       predictor.variance_policy(), sched);
}

Image ddpm_step(const ReverseStepDistribution& dist, Rng& rng) {
  if (dist.sigma2 < 0.0) {
    throw std::invalid_argument("ddpm_step: negative variance");
  }
  if (dist.sigma2 == 0.0) {
    return dist.mu;
  }
  const double s = std::sqrt(dist.sigma2);
  Image out(dist.mu.height(), dist.mu.width(), dist.mu.channels(),
            dist.mu.domain());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = dist.mu[i] + s * rng.normal();
  }
  return out;
}

Image ddim_step(const Image& x_t, const Image& eps_hat, int t, int t_prev,
                const NoiseSchedule& sched) {
  check_step(t, sched, "ddim_step");
  if (t_prev < 0 || t_prev >= t) {
    throw std::invalid_argument("ddim_step: need 0 <= t_prev < t");
  }
  require_same_shape(x_t, eps_hat, "ddim_step");
  const double ab = sched.alpha_bar(t);
  const double ab_prev = sched.alpha_bar(t_prev);
  const double inv_a = 1.0 / std::sqrt(ab);
  const double b = std::sqrt(1.0 - ab);
  const double a_prev = std::sqrt(ab_prev);
  const double b_prev = std::sqrt(1.0 - ab_prev);
  Image out(x_t.height(), x_t.width(), x_t.channels(), x_t.domain());
  const std::size_t n = x_t.size();
#pragma omp parallel for schedule(static) if (n >= par::kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const std::size_t j = static_cast<std::size_t>(i);
    const double x0 = (x_t[j] - b * eps_hat[j]) * inv_a;
    out[j] = a_prev * x0 + b_prev * eps_hat[j];
  }
  return out;
}

std::vector<int> ddim_timesteps(int schedule_steps, int count) {
  if (count < 1 || count > schedule_steps) {
    throw std::invalid_argument(
        "ddim_timesteps: need 1 <= count <= schedule steps");
  }
  std::vector<int> taus(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    // Uniform spacing T/count, rounded; spacing >= 1 keeps entries distinct.
    taus[static_cast<std::size_t>(count - i)] = static_cast<int>(
        std::lround(static_cast<double>(i) * schedule_steps / count));
  }
  return taus;
}

}  // namespace uwdiff
