#pragma once

#include <vector>

#include "uwdiff/image.hpp"

namespace uwdiff {

// Normalized 1D Gaussian taps for radius ceil(3*sigma); sum is 1.
std::vector<double> gaussian_kernel(double sigma);

// Separable Gaussian blur, clamp-to-edge, per channel. sigma > 0.
Image gaussian_blur(const Image& img, double sigma);

// Morphological erosion: each output sample is the minimum over the
// (2*radius+1)^2 neighborhood, clamp-to-edge. Single-channel input.
Image min_filter(const Image& img, int radius);

// Bilinear resample to out_height x out_width (pixel-center alignment).
Image resize_bilinear(const Image& img, int out_height, int out_width);

namespace reference {

// Serial direct-from-definition counterparts of the kernels above: plain 2D
// window loops, no separable decomposition, no OpenMP. The unit tests check
// the optimized kernels against these (exactly for order-independent ops,
// to 1e-12 where summation order differs) and the benchmark tool reports
// the speedup.
Image gaussian_blur(const Image& img, double sigma);
Image min_filter(const Image& img, int radius);
Image resize_bilinear(const Image& img, int out_height, int out_width);

}  // namespace reference

}  // namespace uwdiff
