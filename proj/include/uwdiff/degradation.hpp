#pragma once

#include <array>

#include "uwdiff/image.hpp"
#include "uwdiff/rng.hpp"

namespace uwdiff {

// Koschmieder image-formation parameters: per-pixel background light and a
// single-channel transmission map shared across color channels.
struct DegradationParams {
  Image background_light;  // h x w x 3, Display01
  Image transmission;      // h x w x 1, samples in [0, 1]
};

// y_hat = x * T + (1 - T) * A, clamped to [0, 1].
Image degrade(const Image& x, const DegradationParams& params);

// Background light as a heavy Gaussian blur of the observation,
// sigma = max(H, W) / 8.
Image estimate_background_light(const Image& y);

// Dark-channel transmission stand-in: T = 1 - min_filter(min_c y/A, 7),
// clamped to [0.1, 1]. A is floored at 1e-3 in the division.
Image estimate_transmission(const Image& y, const Image& background_light);

// One gradient-descent step on the transmission map, clamped back to [0, 1].
// When `clamped` is non-null it reports whether any sample hit a bound.
Image refine_transmission(const Image& transmission, const Image& grad,
                          double learning_rate, bool* clamped = nullptr);

struct SyntheticScene {
  Image degraded;
  DegradationParams params;
};

// Test fixture: constant background light, smooth transmission field around
// t0 (amplitude min(0.1, t0, 1 - t0), so t0 = 1 reproduces x exactly), and
// the degraded observation. degrade(x, params) == degraded bit-for-bit.
SyntheticScene synthesize_underwater(const Image& x,
                                     const std::array<double, 3>& a_color,
                                     double t0, Rng& rng);

}  // namespace uwdiff
