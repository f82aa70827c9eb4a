#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uwdiff/image.hpp"
#include "uwdiff/schedule.hpp"

namespace uwdiff {

// What the reverse step uses for its per-step variance: the forward beta_t
// or the true posterior beta_tilde_t.
enum class VariancePolicy { FixedBeta, FixedPosterior };

// Noise predictor seam: given the noisy sample x_t and its timestep, return
// the predicted noise eps_hat with the same shape. Implementations must be
// deterministic and thread-compatible (const predict).
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;
  virtual Image predict(const Image& x_t, int t) const = 0;
  virtual VariancePolicy variance_policy() const = 0;
};

// Analytic predictor for a world where the clean data is exactly
// N(mean, variance * I) per pixel. Then x_t ~ N(sqrt(ab)*mean, ab*v + 1 - ab)
// with ab = alpha_bar(t), the posterior mean of x_0 given x_t is
//
//   E[x0 | x_t] = (sqrt(ab) * v * x_t + (1 - ab) * mean) / (ab * v + 1 - ab)
//
// and the optimal noise estimate is
//
//   eps_hat = (x_t - sqrt(ab) * E[x0 | x_t]) / sqrt(1 - ab).
//
// Every reverse-step map becomes affine in x_t, which is what makes the
// closed-form chain oracles in the tests possible.
class GaussianWorldPredictor final : public NoisePredictor {
 public:
  GaussianWorldPredictor(const NoiseSchedule& schedule, double mean,
                         double variance,
                         VariancePolicy policy = VariancePolicy::FixedPosterior);

  Image predict(const Image& x_t, int t) const override;
  VariancePolicy variance_policy() const override { return policy_; }

  // E[x0 | x_t]; exposed because the tests compare predict_x0 against it.
  Image posterior_mean_x0(const Image& x_t, int t) const;

  double data_mean() const { return mean_; }
  double data_variance() const { return variance_; }

 private:
  NoiseSchedule schedule_;
  double mean_;
  double variance_;
  VariancePolicy policy_;
};

// Predictor backed by a per-timestep grid file: eps_hat(x_t, t) is the
// stored grid for t, independent of x_t. This is the seam for plugging in
// noise predictions computed elsewhere.
//
// File layout, all little-endian: six int32 header fields
// (magic 'EPSF', version 1, steps, height, width, channels), then
// steps * height * width * channels float32 samples, timestep-major with
// t = 1 first.
class PrecomputedPredictor final : public NoisePredictor {
 public:
  static constexpr std::int32_t kMagic = 0x46535045;  // "EPSF"
  static constexpr std::int32_t kVersion = 1;

  static PrecomputedPredictor load(const std::string& path);

  Image predict(const Image& x_t, int t) const override;
  VariancePolicy variance_policy() const override {
    return VariancePolicy::FixedPosterior;
  }

  int steps() const { return steps_; }
  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }

 private:
  PrecomputedPredictor() = default;
  int steps_ = 0, height_ = 0, width_ = 0, channels_ = 0;
  std::vector<float> samples_;
};

// Writes the PrecomputedPredictor file format; grids[t-1] is the prediction
// for timestep t. All grids must share one shape.
void write_predictor_file(const std::string& path,
                          const std::vector<Image>& grids);

}  // namespace uwdiff
