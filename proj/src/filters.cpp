#include "uwdiff/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uwdiff {

namespace {

inline int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

// Shared scalar bodies: the parallel and serial entry points below call the
// same per-output routines, so their results agree bit-for-bit and the only
// difference under test is the scheduling.

inline void blur_row_horizontal(const Image& in, Image& out, int y,
                                const std::vector<double>& k, int radius) {
  const int w = in.width();
  const int c = in.channels();
  for (int x = 0; x < w; ++x) {
    for (int ch = 0; ch < c; ++ch) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        acc += k[static_cast<std::size_t>(d + radius)] *
               in.at(y, clamp_index(x + d, w), ch);
      }
      out.at(y, x, ch) = acc;
    }
  }
}

inline void blur_row_vertical(const Image& in, Image& out, int y,
                              const std::vector<double>& k, int radius) {
  const int h = in.height();
  const int w = in.width();
  const int c = in.channels();
  for (int x = 0; x < w; ++x) {
    for (int ch = 0; ch < c; ++ch) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        acc += k[static_cast<std::size_t>(d + radius)] *
               in.at(clamp_index(y + d, h), x, ch);
      }
      out.at(y, x, ch) = acc;
    }
  }
}

inline void min_row_horizontal(const Image& in, Image& out, int y, int radius) {
  const int w = in.width();
  for (int x = 0; x < w; ++x) {
    double best = in.at(y, clamp_index(x - radius, w), 0);
    for (int d = -radius + 1; d <= radius; ++d) {
      best = std::min(best, in.at(y, clamp_index(x + d, w), 0));
    }
    out.at(y, x, 0) = best;
  }
}

inline void min_row_vertical(const Image& in, Image& out, int y, int radius) {
  const int h = in.height();
  const int w = in.width();
  for (int x = 0; x < w; ++x) {
    double best = in.at(clamp_index(y - radius, h), x, 0);
    for (int d = -radius + 1; d <= radius; ++d) {
      best = std::min(best, in.at(clamp_index(y + d, h), x, 0));
    }
    out.at(y, x, 0) = best;
  }
}

inline void resize_row(const Image& in, Image& out, int oy) {
  const int ih = in.height(), iw = in.width(), c = in.channels();
  const int oh = out.height(), ow = out.width();
  const double sy = static_cast<double>(ih) / oh;
  const double sx = static_cast<double>(iw) / ow;
  const double fy = (oy + 0.5) * sy - 0.5;
  const int y0 = clamp_index(static_cast<int>(std::floor(fy)), ih);
  const int y1 = clamp_index(y0 + 1, ih);
  const double wy = std::clamp(fy - std::floor(fy), 0.0, 1.0);
  for (int ox = 0; ox < ow; ++ox) {
    const double fx = (ox + 0.5) * sx - 0.5;
    const int x0 = clamp_index(static_cast<int>(std::floor(fx)), iw);
    const int x1 = clamp_index(x0 + 1, iw);
    const double wx = std::clamp(fx - std::floor(fx), 0.0, 1.0);
    for (int ch = 0; ch < c; ++ch) {
      const double top = in.at(y0, x0, ch) * (1.0 - wx) + in.at(y0, x1, ch) * wx;
      const double bot = in.at(y1, x0, ch) * (1.0 - wx) + in.at(y1, x1, ch) * wx;
      out.at(oy, ox, ch) = top * (1.0 - wy) + bot * wy;
    }
  }
}

void check_blur_args(const Image& img, double sigma) {
  if (img.empty()) throw std::invalid_argument("gaussian_blur: empty image");
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("gaussian_blur: sigma must be positive, got " +
                                std::to_string(sigma));
  }
}

void check_min_args(const Image& img, int radius) {
  if (img.empty()) throw std::invalid_argument("min_filter: empty image");
  require_channels(img, 1, "min_filter");
  if (radius < 0) {
    throw std::invalid_argument("min_filter: radius must be non-negative");
  }
}

void check_resize_args(const Image& img, int oh, int ow) {
  if (img.empty()) throw std::invalid_argument("resize_bilinear: empty image");
  if (oh <= 0 || ow <= 0) {
    throw std::invalid_argument("resize_bilinear: output dims must be positive");
  }
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int d = -radius; d <= radius; ++d) {
    const double v = std::exp(-(static_cast<double>(d) * d) /
                              (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(d + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

Image gaussian_blur(const Image& img, double sigma) {
  check_blur_args(img, sigma);
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = (static_cast<int>(k.size()) - 1) / 2;
  Image tmp(img.height(), img.width(), img.channels(), img.domain());
  Image out(img.height(), img.width(), img.channels(), img.domain());
  const int h = img.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) blur_row_horizontal(img, tmp, y, k, radius);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) blur_row_vertical(tmp, out, y, k, radius);
  return out;
}

Image min_filter(const Image& img, int radius) {
  check_min_args(img, radius);
  Image tmp(img.height(), img.width(), 1, img.domain());
  Image out(img.height(), img.width(), 1, img.domain());
  const int h = img.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) min_row_horizontal(img, tmp, y, radius);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) min_row_vertical(tmp, out, y, radius);
  return out;
}

Image resize_bilinear(const Image& img, int out_height, int out_width) {
  check_resize_args(img, out_height, out_width);
  Image out(out_height, out_width, img.channels(), img.domain());
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < out_height; ++oy) resize_row(img, out, oy);
  return out;
}

namespace reference {

Image gaussian_blur(const Image& img, double sigma) {
  check_blur_args(img, sigma);
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = (static_cast<int>(k.size()) - 1) / 2;
  const int h = img.height(), w = img.width(), c = img.channels();
  Image out(h, w, c, img.domain());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        double acc = 0.0;
        for (int dy = -radius; dy <= radius; ++dy) {
          for (int dx = -radius; dx <= radius; ++dx) {
            acc += k[static_cast<std::size_t>(dy + radius)] *
                   k[static_cast<std::size_t>(dx + radius)] *
                   img.at(clamp_index(y + dy, h), clamp_index(x + dx, w), ch);
          }
        }
        out.at(y, x, ch) = acc;
      }
    }
  }
  return out;
}

Image min_filter(const Image& img, int radius) {
  check_min_args(img, radius);
  const int h = img.height(), w = img.width();
  Image out(h, w, 1, img.domain());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = img.at(clamp_index(y - radius, h), clamp_index(x - radius, w), 0);
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          best = std::min(best, img.at(clamp_index(y + dy, h),
                                       clamp_index(x + dx, w), 0));
        }
      }
      out.at(y, x, 0) = best;
    }
  }
  return out;
}

Image resize_bilinear(const Image& img, int out_height, int out_width) {
  check_resize_args(img, out_height, out_width);
  Image out(out_height, out_width, img.channels(), img.domain());
  for (int oy = 0; oy < out_height; ++oy) resize_row(img, out, oy);
  return out;
}

}  // namespace reference

}  // namespace uwdiff
