#pragma once

#include <vector>

#include "uwdiff/image.hpp"
#include "uwdiff/predictor.hpp"
#include "uwdiff/rng.hpp"
#include "uwdiff/schedule.hpp"

namespace uwdiff {

// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps.
Image forward_sample(const Image& x0, int t, const Image& eps,
                     const NoiseSchedule& sched);

// Inverts the forward map given the noise estimate:
// x0_hat = x_t / sqrt(alpha_bar_t) - sqrt(1 - alpha_bar_t) / sqrt(alpha_bar_t) * eps_hat.
Image predict_x0(const Image& x_t, const Image& eps_hat, int t,
                 const NoiseSchedule& sched);

// One reverse-step Gaussian: mean from the predicted noise, isotropic
// per-step variance chosen by the predictor's policy.
struct ReverseStepDistribution {
  Image mu;
  double sigma2 = 0.0;
};

ReverseStepDistribution reverse_distribution(const Image& x_t, int t,
                                             const NoisePredictor& predictor,
                                             const NoiseSchedule& sched);

// Same distribution with the predictor call already done; the guided loops
// use it so one eps_hat serves both the mean and the clean estimate.
ReverseStepDistribution reverse_distribution_from_eps(
    const Image& x_t, const Image& eps_hat, int t, VariancePolicy policy,
    const NoiseSchedule& sched);

// Draws mu + sqrt(sigma2) * z. sigma2 == 0 returns mu exactly and consumes
// no randomness; the sampling loops zero sigma2 at the final step.
Image ddpm_step(const ReverseStepDistribution& dist, Rng& rng);

// Deterministic (eta = 0) update from timestep t to t_prev < t; t_prev == 0
// lands on the clean estimate.
Image ddim_step(const Image& x_t, const Image& eps_hat, int t, int t_prev,
                const NoiseSchedule& sched);

// Descending timestep subsequence for DDIM: `count` entries ending at the
// schedule's top step, spaced uniformly; the caller finishes at t_prev = 0.
std::vector<int> ddim_timesteps(int schedule_steps, int count);

}  // namespace uwdiff
