#include "uwdiff/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uwdiff/parallel.hpp"

namespace uwdiff {

Image::Image(int height, int width, int channels, Domain domain)
    : height_(height), width_(width), channels_(channels), domain_(domain) {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("image dimensions must be positive, got " +
                                std::to_string(height) + "x" +
                                std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("image channels must be 1 or 3, got " +
                                std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
}

Image Image::constant(int height, int width, int channels, double value,
                      Domain domain) {
  Image img(height, width, channels, domain);
  std::fill(img.data_.begin(), img.data_.end(), value);
  return img;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                std::to_string(a.height()) + "x" +
                                std::to_string(a.width()) + "x" +
                                std::to_string(a.channels()) + " vs " +
                                std::to_string(b.height()) + "x" +
                                std::to_string(b.width()) + "x" +
                                std::to_string(b.channels()) + ")");
  }
}

void require_channels(const Image& img, int channels, const char* what) {
  if (img.channels() != channels) {
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(channels) + " channels, got " +
                                std::to_string(img.channels()));
  }
}

Image to_latent(const Image& img) {
  if (img.domain() != Domain::Display01) {
    throw std::invalid_argument("to_latent: input must be Display01");
  }
  Image out(img.height(), img.width(), img.channels(), Domain::LatentSigned);
  const std::size_t n = img.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = img[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument(
          "to_latent: sample outside [0, 1] at index " + std::to_string(i));
    }
    out[i] = 2.0 * v - 1.0;
  }
  return out;
}

Image from_latent(const Image& img) {
  if (img.domain() != Domain::LatentSigned) {
    throw std::invalid_argument("from_latent: input must be LatentSigned");
  }
  Image out(img.height(), img.width(), img.channels(), Domain::Display01);
  const std::size_t n = img.size();
#pragma omp parallel for schedule(static) if (n >= par::kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    out[static_cast<std::size_t>(i)] =
        std::clamp((img[static_cast<std::size_t>(i)] + 1.0) * 0.5, 0.0, 1.0);
  }
  return out;
}

Image add_scaled(const Image& a, const Image& b, double s) {
  require_same_shape(a, b, "add_scaled");
  Image out(a.height(), a.width(), a.channels(), a.domain());
  const std::size_t n = a.size();
#pragma omp parallel for schedule(static) if (n >= par::kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    out[static_cast<std::size_t>(i)] =
        a[static_cast<std::size_t>(i)] + s * b[static_cast<std::size_t>(i)];
  }
  return out;
}

double l2_norm(const Image& img) {
  const int rows = img.height();
  const std::size_t stride =
      static_cast<std::size_t>(img.width()) * img.channels();
  const double* p = img.data();
  const double sq = par::row_sum(rows, [&](int y) {
    const double* r = p + static_cast<std::size_t>(y) * stride;
    double acc = 0.0;
    for (std::size_t i = 0; i < stride; ++i) acc += r[i] * r[i];
    return acc;
  });
  return std::sqrt(sq);
}

double max_abs(const Image& img) {
  const int rows = img.height();
  const std::size_t stride =
      static_cast<std::size_t>(img.width()) * img.channels();
  const double* p = img.data();
  return par::row_max(rows, [&](int y) {
    const double* r = p + static_cast<std::size_t>(y) * stride;
    double best = 0.0;
    for (std::size_t i = 0; i < stride; ++i) best = std::max(best, std::fabs(r[i]));
    return best;
  });
}

double mean(const Image& img) {
  if (img.empty()) return 0.0;
  const int rows = img.height();
  const std::size_t stride =
      static_cast<std::size_t>(img.width()) * img.channels();
  const double* p = img.data();
  const double total = par::row_sum(rows, [&](int y) {
    const double* r = p + static_cast<std::size_t>(y) * stride;
    double acc = 0.0;
    for (std::size_t i = 0; i < stride; ++i) acc += r[i];
    return acc;
  });
  return total / static_cast<double>(img.size());
}

}  // namespace uwdiff
