#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uwdiff/image.hpp"

namespace uwdiff {

// 10 * log10(1 / MSE) over all samples; +infinity for identical images.
double psnr(const Image& a, const Image& b);

// Single-scale structural similarity: valid-mode 11x11 Gaussian windows
// (sigma 1.5), C1 = 0.01^2, C2 = 0.03^2, averaged over channels.
double ssim(const Image& a, const Image& b);

// CIELab composite of chroma spread, luminance contrast, and saturation.
double uciqe(const Image& img);

// Colorfulness / sharpness / contrast composite over 8x8 block statistics.
double uiqm(const Image& img);

struct MetricRow {
  std::string image;
  std::optional<double> psnr;
  std::optional<double> ssim;
  double uciqe = 0.0;
  double uiqm = 0.0;
};

// Per-image rows plus an arithmetic-mean aggregate. PSNR/SSIM columns are
// emitted only when the run had a reference directory.
struct MetricReport {
  bool has_reference = false;
  std::vector<MetricRow> rows;

  MetricRow aggregate() const;
  std::string to_csv() const;
};

}  // namespace uwdiff
