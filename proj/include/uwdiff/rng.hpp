#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "uwdiff/image.hpp"

namespace uwdiff {

// Deterministic random source. Gaussian draws use an explicit Box-Muller
// transform instead of std::normal_distribution, whose output sequence is
// implementation-defined; every sampled chain in this library must replay
// bit-identically from its seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Row-major fill of iid standard normals.
  Image normal_image(int height, int width, int channels, Domain domain) {
    Image img(height, width, channels, domain);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = normal();
    return img;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace uwdiff
