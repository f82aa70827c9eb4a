#include "uwdiff/degradation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uwdiff/filters.hpp"

namespace uwdiff {

namespace {

void check_params(const Image& x, const DegradationParams& params,
                  const char* what) {
  require_channels(x, 3, what);
  require_same_shape(x, params.background_light, what);
  if (params.transmission.height() != x.height() ||
      params.transmission.width() != x.width() ||
      params.transmission.channels() != 1) {
    throw std::invalid_argument(std::string(what) +
                                ": transmission map must be HxWx1");
  }
}

}  // namespace

Image degrade(const Image& x, const DegradationParams& params) {
  check_params(x, params, "degrade");
  Image out(x.height(), x.width(), 3, Domain::Display01);
  const int h = x.height(), w = x.width();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int xx = 0; xx < w; ++xx) {
      const double t = params.transmission.at(y, xx, 0);
      for (int c = 0; c < 3; ++c) {
        const double v =
            x.at(y, xx, c) * t + (1.0 - t) * params.background_light.at(y, xx, c);
        out.at(y, xx, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

Image estimate_background_light(const Image& y) {
  const double sigma = std::max(y.height(), y.width()) / 8.0;
  return gaussian_blur(y, sigma);
}

Image estimate_transmission(const Image& y, const Image& background_light) {
  require_channels(y, 3, "estimate_transmission");
  require_same_shape(y, background_light, "estimate_transmission");
  const int h = y.height(), w = y.width();
  Image dark(h, w, 1, Domain::LatentSigned);
#pragma omp parallel for schedule(static)
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) {
      double m = 1e300;
      for (int c = 0; c < 3; ++c) {
        const double a = std::max(background_light.at(yy, xx, c), 1e-3);
        m = std::min(m, y.at(yy, xx, c) / a);
      }
      dark.at(yy, xx, 0) = m;
    }
  }
  Image eroded = min_filter(dark, 7);
  Image t(h, w, 1, Domain::LatentSigned);
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = std::clamp(1.0 - eroded[i], 0.1, 1.0);
  }
  return t;
}

Image refine_transmission(const Image& transmission, const Image& grad,
                          double learning_rate, bool* clamped) {
  require_same_shape(transmission, grad, "refine_transmission");
  if (learning_rate < 0.0) {
    throw std::invalid_argument("refine_transmission: negative learning rate");
  }
  Image out = transmission;
  bool hit = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = transmission[i] - learning_rate * grad[i];
    if (v < 0.0 || v > 1.0) hit = true;
    out[i] = std::clamp(v, 0.0, 1.0);
  }
  if (clamped != nullptr) *clamped = hit;
  return out;
}

SyntheticScene synthesize_underwater(const Image& x,
                                     const std::array<double, 3>& a_color,
                                     double t0, Rng& rng) {
  require_channels(x, 3, "synthesize_underwater");
  for (double a : a_color) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument(
          "synthesize_underwater: background color outside [0, 1]");
    }
  }
  if (!(t0 > 0.0 && t0 <= 1.0)) {
    throw std::invalid_argument("synthesize_underwater: t0 outside (0, 1]");
  }
  const int h = x.height(), w = x.width();

  SyntheticScene scene;
  scene.params.background_light = Image(h, w, 3, Domain::Display01);
  for (int y = 0; y < h; ++y) {
    for (int xx = 0; xx < w; ++xx) {
      for (int c = 0; c < 3; ++c) {
        scene.params.background_light.at(y, xx, c) =
            a_color[static_cast<std::size_t>(c)];
      }
    }
  }

  const double amplitude = std::min({0.1, t0, 1.0 - t0});
  Image field = gaussian_blur(rng.normal_image(h, w, 1, Domain::LatentSigned),
                              std::max(h, w) / 16.0);
  const double peak = max_abs(field);
  const double scale = peak > 0.0 ? amplitude / peak : 0.0;
  scene.params.transmission = Image(h, w, 1, Domain::LatentSigned);
  for (std::size_t i = 0; i < field.size(); ++i) {
    scene.params.transmission[i] = t0 + scale * field[i];
  }

  scene.degraded = degrade(x, scene.params);
  return scene;
}

}  // namespace uwdiff
