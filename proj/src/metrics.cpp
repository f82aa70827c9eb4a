#include "uwdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "uwdiff/color.hpp"
#include "uwdiff/losses.hpp"
#include "uwdiff/metric_constants.hpp"
#include "uwdiff/parallel.hpp"
#include "uwdiff/stats.hpp"

namespace uwdiff {

namespace mc = metric_constants;

double psnr(const Image& a, const Image& b) {
  require_same_shape(a, b, "psnr");
  const std::size_t stride = static_cast<std::size_t>(a.width()) * a.channels();
  const double mse = par::row_sum(a.height(), [&](int y) {
                       const std::size_t base = static_cast<std::size_t>(y) * stride;
                       double acc = 0.0;
                       for (std::size_t i = 0; i < stride; ++i) {
                         const double d = a[base + i] - b[base + i];
                         acc += d * d;
                       }
                       return acc;
                     }) /
                     static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

double ssim(const Image& a, const Image& b) { return ssim_index(a, b); }

double uciqe(const Image& img) {
  require_channels(img, 3, "uciqe");
  const Image lab = rgb_to_lab(img);
  const int h = img.height(), w = img.width();
  const std::size_t n = static_cast<std::size_t>(h) * w;

  std::vector<double> luma(n);
  double chroma_sum = 0.0, chroma_sq_sum = 0.0, sat_sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double l = lab.at(y, x, 0);
      const double ca = lab.at(y, x, 1);
      const double cb = lab.at(y, x, 2);
      const double chroma = std::sqrt(ca * ca + cb * cb);
      luma[static_cast<std::size_t>(y) * w + x] = l;
      chroma_sum += chroma;
      chroma_sq_sum += chroma * chroma;
      const double denom = std::sqrt(chroma * chroma + l * l);
      sat_sum += denom > 0.0 ? chroma / denom : 0.0;
    }
  }
  const double nn = static_cast<double>(n);
  const double chroma_mean = chroma_sum / nn;
  const double chroma_var =
      std::max(chroma_sq_sum / nn - chroma_mean * chroma_mean, 0.0);
  // L and chroma live on the 0..100 Lab scale; normalize to unit range.
  const double sigma_chroma = std::sqrt(chroma_var) / 100.0;
  const double contrast_l =
      (percentile(luma, 0.99) - percentile(luma, 0.01)) / 100.0;
  const double mean_sat = sat_sum / nn;
  return mc::kUciqeChromaStd * sigma_chroma +
         mc::kUciqeLumaContrast * contrast_l + mc::kUciqeSaturation * mean_sat;
}

namespace {

// Sobel gradient magnitude with clamp-to-edge sampling, one channel.
std::vector<double> sobel_magnitude(const Image& img, int channel) {
  const int h = img.height(), w = img.width();
  std::vector<double> mag(static_cast<std::size_t>(h) * w);
  auto px = [&](int y, int x) {
    y = std::clamp(y, 0, h - 1);
    x = std::clamp(x, 0, w - 1);
    return img.at(y, x, channel);
  };
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = -px(y - 1, x - 1) + px(y - 1, x + 1) -
                        2.0 * px(y, x - 1) + 2.0 * px(y, x + 1) -
                        px(y + 1, x - 1) + px(y + 1, x + 1);
      const double gy = -px(y - 1, x - 1) - 2.0 * px(y - 1, x) -
                        px(y - 1, x + 1) + px(y + 1, x - 1) +
                        2.0 * px(y + 1, x) + px(y + 1, x + 1);
      mag[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy);
    }
  }
  return mag;
}

// Enhancement-measure sum over full 8x8 blocks: (2/K) * sum ln(max/min),
// epsilon-guarded. Partial edge blocks are dropped.
double eme(const std::vector<double>& map, int h, int w) {
  const int by = h / mc::kBlockSize, bx = w / mc::kBlockSize;
  double acc = 0.0;
  for (int yb = 0; yb < by; ++yb) {
    for (int xb = 0; xb < bx; ++xb) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int dy = 0; dy < mc::kBlockSize; ++dy) {
        for (int dx = 0; dx < mc::kBlockSize; ++dx) {
          const double v = map[static_cast<std::size_t>(yb * mc::kBlockSize + dy) * w +
                               (xb * mc::kBlockSize + dx)];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      acc += std::log((hi + mc::kLogEps) / (lo + mc::kLogEps));
    }
  }
  return 2.0 / (static_cast<double>(by) * bx) * acc;
}

double plip_add(double a, double b) { return a + b - a * b / mc::kPlipGamma; }
double plip_sub(double a, double b) {
  return mc::kPlipGamma * (a - b) / (mc::kPlipGamma - b);
}

double uicm(const Image& img) {
  const int h = img.height(), w = img.width();
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::vector<double> rg(n), yb(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double r = img.at(y, x, 0), g = img.at(y, x, 1), b = img.at(y, x, 2);
      rg[i] = r - g;
      yb[i] = 0.5 * (r + g) - b;
    }
  }
  const double mu_rg = trimmed_mean(rg, mc::kUicmTrimAlpha);
  const double mu_yb = trimmed_mean(yb, mc::kUicmTrimAlpha);
  double var_rg = 0.0, var_yb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    var_rg += (rg[i] - mu_rg) * (rg[i] - mu_rg);
    var_yb += (yb[i] - mu_yb) * (yb[i] - mu_yb);
  }
  var_rg /= static_cast<double>(n);
  var_yb /= static_cast<double>(n);
  return mc::kUicmMeanCoeff * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb) +
         mc::kUicmVarCoeff * std::sqrt(var_rg + var_yb);
}

double uism(const Image& img) {
  const double weights[3] = {mc::kUismLumaR, mc::kUismLumaG, mc::kUismLumaB};
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) {
    acc += weights[c] * eme(sobel_magnitude(img, c), img.height(), img.width());
  }
  return acc;
}

double uiconm(const Image& img) {
  const int h = img.height(), w = img.width();
  const int by = h / mc::kBlockSize, bx = w / mc::kBlockSize;
  double acc = 0.0;
  for (int yb = 0; yb < by; ++yb) {
    for (int xb = 0; xb < bx; ++xb) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (int dy = 0; dy < mc::kBlockSize; ++dy) {
        for (int dx = 0; dx < mc::kBlockSize; ++dx) {
          const int y = yb * mc::kBlockSize + dy, x = xb * mc::kBlockSize + dx;
          const double v =
              (img.at(y, x, 0) + img.at(y, x, 1) + img.at(y, x, 2)) / 3.0;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      }
      const double m = plip_sub(hi, lo) / (plip_add(hi, lo) + mc::kLogEps);
      acc += m * std::log(m + mc::kLogEps);
    }
  }
  return -acc / (static_cast<double>(by) * bx);
}

}  // namespace

double uiqm(const Image& img) {
  require_channels(img, 3, "uiqm");
  if (img.height() < mc::kBlockSize || img.width() < mc::kBlockSize) {
    throw std::invalid_argument("uiqm: image smaller than one 8x8 block");
  }
  return mc::kUiqmColorfulness * uicm(img) + mc::kUiqmSharpness * uism(img) +
         mc::kUiqmContrast * uiconm(img);
}

namespace {

std::string format_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

MetricRow MetricReport::aggregate() const {
  MetricRow agg;
  agg.image = "aggregate";
  if (rows.empty()) return agg;
  const double n = static_cast<double>(rows.size());
  double psnr_sum = 0.0, ssim_sum = 0.0;
  for (const MetricRow& r : rows) {
    agg.uciqe += r.uciqe / n;
    agg.uiqm += r.uiqm / n;
    if (has_reference) {
      psnr_sum += r.psnr.value_or(0.0);
      ssim_sum += r.ssim.value_or(0.0);
    }
  }
  if (has_reference) {
    agg.psnr = psnr_sum / n;
    agg.ssim = ssim_sum / n;
  }
  return agg;
}

std::string MetricReport::to_csv() const {
  std::string out = has_reference ? "image,psnr,ssim,uciqe,uiqm\n"
                                  : "image,uciqe,uiqm\n";
  auto append_row = [&](const MetricRow& r) {
    out += r.image;
    if (has_reference) {
      out += ',' + format_metric(r.psnr.value_or(0.0));
      out += ',' + format_metric(r.ssim.value_or(0.0));
    }
    out += ',' + format_metric(r.uciqe);
    out += ',' + format_metric(r.uiqm);
    out += '\n';
  };
  for (const MetricRow& r : rows) append_row(r);
  if (!rows.empty()) append_row(aggregate());
  return out;
}

}  // namespace uwdiff
