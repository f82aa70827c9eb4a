#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uwdiff/image.hpp"

namespace uwdiff {

// Scalar loss plus its analytic gradient with respect to the second
// argument (the image being optimized).
struct ValueGrad {
  double value = 0.0;
  Image grad;
};

// Mean absolute error; gradient is sign(b - a) / N with sign(0) = 0.
ValueGrad mae(const Image& a, const Image& b);

// Multi-scale structural similarity, up to 5 scales of 11x11 Gaussian
// windows (sigma 1.5) slid over valid positions, 2x2 average pooling
// between scales. Scales whose min dimension drops below the window are
// truncated and the canonical scale weights are renormalized over the
// survivors; the coarsest surviving scale contributes luminance. Identical
// images score exactly 1. Gradient is the analytic quotient-rule expansion
// through the windowed statistics.
ValueGrad ms_ssim(const Image& a, const Image& b);

// Single-scale form of the same index (the full luminance * contrast-
// structure map at the native resolution); shared by the metrics module.
double ssim_index(const Image& a, const Image& b);

// Arbitrary-channel feature map for the perceptual distance.
struct Tensor {
  int height = 0, width = 0, channels = 0;
  std::vector<double> v;
  double at(int y, int x, int c) const {
    return v[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

inline constexpr std::uint64_t kDefaultFeatureSeed = 0x5EEDBEEFull;

// Fixed random-convolution feature extractor standing in for a pretrained
// perceptual backbone: three 3x3 stride-2 stages (3->8->16->32 channels),
// half-rectified, weights drawn once from a seeded Gaussian with scale
// 1/sqrt(fan_in) and no biases. The same seed always reproduces the same
// weights, so feature distances are stable across runs.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(std::uint64_t seed = kDefaultFeatureSeed);

  // Stage outputs (after rectification), finest first. Input must have 3
  // channels and be at least 8x8 so the last stage keeps a pixel.
  std::vector<Tensor> forward(const Image& img) const;

  std::uint64_t seed() const { return seed_; }

  struct Layer {
    int in_ch = 0, out_ch = 0;
    std::vector<double> w;  // [out][in][ky][kx]
  };

 private:
  friend ValueGrad perceptual(const Image&, const Image&,
                              const FeatureExtractor&);
  std::vector<Layer> layers_;
  std::uint64_t seed_;
};

// Mean squared feature distance summed over the three stages; gradient
// w.r.t. b backpropagates through the shared stages.
ValueGrad perceptual(const Image& a, const Image& b,
                     const FeatureExtractor& fx);

// Differentiable no-reference quality scores. Both are zero on constant
// images and smooth everywhere (kappa = 1e-3 rounds the magnitude kinks).
ValueGrad colorfulness_score(const Image& x);  // opponent-chroma magnitude
ValueGrad contrast_score(const Image& x);      // luminance gradient magnitude
// Combined score 0.5 * colorfulness + 0.5 * contrast.
ValueGrad quality_proxy(const Image& x);

// Weights of the guided total loss
//   total = mae - l1 * ms_ssim + l2 * perceptual
//           - l3 * colorfulness - l4 * contrast.
// Defaults are the reference-paired evaluation preset.
struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 0.005;
  double lambda3 = 0.001;
  double lambda4 = 1e-5;
};

struct LossReport {
  double total = 0.0;
  double mae = 0.0;
  double ms_ssim = 0.0;
  double perceptual = 0.0;
  double quality_a = 0.0;  // colorfulness slot
  double quality_b = 0.0;  // contrast slot
};

struct TotalLoss {
  LossReport report;
  Image grad;  // w.r.t. x
};

// Full guidance loss of x against the target x_hat. Terms with zero weight
// are skipped entirely (their report slots stay 0).
TotalLoss total_loss(const Image& x_hat, const Image& x, const LossWeights& w,
                     const FeatureExtractor& fx);

// Central-difference check of f's gradient at `point`: perturbs a
// deterministic subsample of at least 64 coordinates (all of them for small
// images) by +-h and returns the maximum relative error against the
// analytic gradient.
double gradcheck(const std::function<ValueGrad(const Image&)>& f,
                 const Image& point, double h);

}  // namespace uwdiff
