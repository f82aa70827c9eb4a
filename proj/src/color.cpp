#include "uwdiff/color.hpp"

#include <cmath>
#include <stdexcept>

namespace uwdiff {

namespace {

// D65 white point; the matrix rows sum to exactly these values so neutral
// inputs stay neutral in Lab.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.00000;
constexpr double kZn = 1.08883;

inline double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double kCube = 216.0 / 24389.0;  // (6/29)^3
  constexpr double kSlope = 841.0 / 108.0;   // 1 / (3*(6/29)^2)
  return t > kCube ? std::cbrt(t) : kSlope * t + 4.0 / 29.0;
}

}  // namespace

Image rgb_to_lab(const Image& img) {
  if (img.domain() != Domain::Display01) {
    throw std::invalid_argument("rgb_to_lab: input must be Display01");
  }
  require_channels(img, 3, "rgb_to_lab");

  Image out(img.height(), img.width(), 3, Domain::LatentSigned);
  const int h = img.height(), w = img.width();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = srgb_to_linear(img.at(y, x, 0));
      const double g = srgb_to_linear(img.at(y, x, 1));
      const double b = srgb_to_linear(img.at(y, x, 2));
      const double xyz_x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
      const double xyz_y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
      const double xyz_z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
      const double fx = lab_f(xyz_x / kXn);
      const double fy = lab_f(xyz_y / kYn);
      const double fz = lab_f(xyz_z / kZn);
      out.at(y, x, 0) = 116.0 * fy - 16.0;
      out.at(y, x, 1) = 500.0 * (fx - fy);
      out.at(y, x, 2) = 200.0 * (fy - fz);
    }
  }
  return out;
}

}  // namespace uwdiff
