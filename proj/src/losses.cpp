#include "uwdiff/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uwdiff/parallel.hpp"
#include "uwdiff/rng.hpp"

namespace uwdiff {

namespace {

// ---------------------------------------------------------------------------
// Windowed-statistics machinery shared by ms_ssim and ssim_index.

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;
constexpr int kMaxScales = 5;
constexpr double kCanonicalScaleWeights[kMaxScales] = {0.0448, 0.2856, 0.3001,
                                                       0.2363, 0.1333};
// Per-scale means this small are floored before entering the weighted
// product; the gradient through a floored scale is zero.
constexpr double kScaleFloor = 1e-6;

// Single-channel plane; LatentSigned marks the samples as raw numbers.
Image make_plane(int h, int w) { return Image(h, w, 1, Domain::LatentSigned); }

std::vector<double> window_taps() {
  std::vector<double> k(kWindow);
  double sum = 0.0;
  const int radius = kWindow / 2;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - radius;
    k[static_cast<std::size_t>(i)] =
        std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    sum += k[static_cast<std::size_t>(i)];
  }
  for (double& v : k) v /= sum;
  return k;
}

Image extract_channel(const Image& img, int c) {
  Image out = make_plane(img.height(), img.width());
  const int h = img.height(), w = img.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) out.at(y, x, 0) = img.at(y, x, c);
  }
  return out;
}

Image multiply(const Image& a, const Image& b) {
  Image out = make_plane(a.height(), a.width());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

// Valid-mode correlation with the separable window: output is
// (H - 10) x (W - 10), no padding enters any statistic.
Image valid_corr(const Image& in, const std::vector<double>& k) {
  const int h = in.height(), w = in.width();
  const int taps = static_cast<int>(k.size());
  const int oh = h - taps + 1, ow = w - taps + 1;
  Image tmp = make_plane(h, ow);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int d = 0; d < taps; ++d) {
        acc += k[static_cast<std::size_t>(d)] * in.at(y, x + d, 0);
      }
      tmp.at(y, x, 0) = acc;
    }
  }
  Image out = make_plane(oh, ow);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int d = 0; d < taps; ++d) {
        acc += k[static_cast<std::size_t>(d)] * tmp.at(y + d, x, 0);
      }
      out.at(y, x, 0) = acc;
    }
  }
  return out;
}

// Adjoint of valid_corr: scatters window-position gradients back to pixel
// space, i.e. a zero-padded full correlation with the same symmetric taps.
Image valid_corr_adjoint(const Image& g, int in_h, int in_w,
                         const std::vector<double>& k) {
  const int taps = static_cast<int>(k.size());
  const int gh = g.height(), gw = g.width();
  Image tmp = make_plane(in_h, gw);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < in_h; ++y) {
    for (int x = 0; x < gw; ++x) {
      double acc = 0.0;
      for (int d = 0; d < taps; ++d) {
        const int sy = y - d;
        if (sy >= 0 && sy < gh) {
          acc += k[static_cast<std::size_t>(d)] * g.at(sy, x, 0);
        }
      }
      tmp.at(y, x, 0) = acc;
    }
  }
  Image out = make_plane(in_h, in_w);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < in_h; ++y) {
    for (int x = 0; x < in_w; ++x) {
      double acc = 0.0;
      for (int d = 0; d < taps; ++d) {
        const int sx = x - d;
        if (sx >= 0 && sx < gw) {
          acc += k[static_cast<std::size_t>(d)] * tmp.at(y, sx, 0);
        }
      }
      out.at(y, x, 0) = acc;
    }
  }
  return out;
}

Image avg_pool2(const Image& in) {
  const int oh = in.height() / 2, ow = in.width() / 2;
  Image out = make_plane(oh, ow);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      out.at(y, x, 0) = 0.25 * (in.at(2 * y, 2 * x, 0) + in.at(2 * y, 2 * x + 1, 0) +
                                in.at(2 * y + 1, 2 * x, 0) +
                                in.at(2 * y + 1, 2 * x + 1, 0));
    }
  }
  return out;
}

Image avg_pool2_adjoint(const Image& g, int in_h, int in_w) {
  Image out = make_plane(in_h, in_w);
  const int gh = g.height(), gw = g.width();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < gh; ++y) {
    for (int x = 0; x < gw; ++x) {
      const double v = 0.25 * g.at(y, x, 0);
      out.at(2 * y, 2 * x, 0) = v;
      out.at(2 * y, 2 * x + 1, 0) = v;
      out.at(2 * y + 1, 2 * x, 0) = v;
      out.at(2 * y + 1, 2 * x + 1, 0) = v;
    }
  }
  return out;
}

struct ScaleStats {
  Image ua, ub, saa, sbb, sab;  // raw windowed moments
  Image cs, l;                  // derived maps
};

ScaleStats scale_stats(const Image& a, const Image& b,
                       const std::vector<double>& taps) {
  ScaleStats s;
  s.ua = valid_corr(a, taps);
  s.ub = valid_corr(b, taps);
  s.saa = valid_corr(multiply(a, a), taps);
  s.sbb = valid_corr(multiply(b, b), taps);
  s.sab = valid_corr(multiply(a, b), taps);
  const int oh = s.ua.height(), ow = s.ua.width();
  s.cs = make_plane(oh, ow);
  s.l = make_plane(oh, ow);
  for (std::size_t i = 0; i < s.ua.size(); ++i) {
    const double ua = s.ua[i], ub = s.ub[i];
    const double va = s.saa[i] - ua * ua;
    const double vb = s.sbb[i] - ub * ub;
    const double cov = s.sab[i] - ua * ub;
    s.cs[i] = (2.0 * cov + kC2) / (va + vb + kC2);
    s.l[i] = (2.0 * ua * ub + kC1) / (ua * ua + ub * ub + kC1);
  }
  return s;
}

double plane_mean(const Image& p) {
  const double total = par::row_sum(p.height(), [&](int y) {
    double acc = 0.0;
    for (int x = 0; x < p.width(); ++x) acc += p.at(y, x, 0);
    return acc;
  });
  return total / static_cast<double>(p.size());
}

int usable_scales(int h, int w) {
  int scales = 0;
  while (scales < kMaxScales && std::min(h, w) >= kWindow) {
    ++scales;
    h /= 2;
    w /= 2;
  }
  return scales;
}

void check_ssim_inputs(const Image& a, const Image& b, const char* what) {
  require_same_shape(a, b, what);
  if (std::min(a.height(), a.width()) < kWindow) {
    throw std::invalid_argument(std::string(what) +
                                ": image smaller than the 11x11 window");
  }
}

// ---------------------------------------------------------------------------
// Feature-extractor internals.

Tensor image_to_tensor(const Image& img) {
  Tensor t;
  t.height = img.height();
  t.width = img.width();
  t.channels = img.channels();
  t.v.assign(img.data(), img.data() + img.size());
  return t;
}

int conv_out_dim(int n) { return (n - 1) / 2 + 1; }  // stride 2, pad 1, k 3

Tensor conv_forward(const Tensor& in, const FeatureExtractor::Layer& layer);
Tensor conv_backward(const Tensor& delta, const Tensor& in_shape,
                     const FeatureExtractor::Layer& layer);

}  // namespace

// ---------------------------------------------------------------------------
// MAE.

ValueGrad mae(const Image& a, const Image& b) {
  require_same_shape(a, b, "mae");
  const double n = static_cast<double>(a.size());
  const std::size_t stride =
      static_cast<std::size_t>(a.width()) * a.channels();
  ValueGrad out;
  out.value = par::row_sum(a.height(), [&](int y) {
                const std::size_t base = static_cast<std::size_t>(y) * stride;
                double acc = 0.0;
                for (std::size_t i = 0; i < stride; ++i) {
                  acc += std::fabs(a[base + i] - b[base + i]);
                }
                return acc;
              }) /
              n;
  out.grad = Image(a.height(), a.width(), a.channels(), Domain::LatentSigned);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i];
    out.grad[i] = d > 0.0 ? 1.0 / n : (d < 0.0 ? -1.0 / n : 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MS-SSIM.

ValueGrad ms_ssim(const Image& a, const Image& b) {
  check_ssim_inputs(a, b, "ms_ssim");
  const std::vector<double> taps = window_taps();
  const int channels = a.channels();
  const int scales = usable_scales(a.height(), a.width());

  double weight_sum = 0.0;
  for (int j = 0; j < scales; ++j) weight_sum += kCanonicalScaleWeights[j];
  std::vector<double> gamma(static_cast<std::size_t>(scales));
  for (int j = 0; j < scales; ++j) {
    gamma[static_cast<std::size_t>(j)] = kCanonicalScaleWeights[j] / weight_sum;
  }

  // Forward: per-channel pyramids and per-scale statistics.
  std::vector<std::vector<Image>> pa(static_cast<std::size_t>(channels));
  std::vector<std::vector<Image>> pb(static_cast<std::size_t>(channels));
  std::vector<std::vector<ScaleStats>> stats(static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    Image ca = extract_channel(a, c);
    Image cb = extract_channel(b, c);
    for (int j = 0; j < scales; ++j) {
      if (j > 0) {
        ca = avg_pool2(ca);
        cb = avg_pool2(cb);
      }
      pa[static_cast<std::size_t>(c)].push_back(ca);
      pb[static_cast<std::size_t>(c)].push_back(cb);
      stats[static_cast<std::size_t>(c)].push_back(scale_stats(ca, cb, taps));
    }
  }

  std::vector<double> scale_value(static_cast<std::size_t>(scales), 0.0);
  for (int j = 0; j < scales; ++j) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      const ScaleStats& s = stats[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
      acc += j + 1 == scales ? plane_mean(multiply(s.l, s.cs)) : plane_mean(s.cs);
    }
    scale_value[static_cast<std::size_t>(j)] = acc / channels;
  }

  double value = 1.0;
  std::vector<bool> floored(static_cast<std::size_t>(scales), false);
  for (int j = 0; j < scales; ++j) {
    double s = scale_value[static_cast<std::size_t>(j)];
    if (s < kScaleFloor) {
      s = kScaleFloor;
      floored[static_cast<std::size_t>(j)] = true;
    }
    value *= std::pow(s, gamma[static_cast<std::size_t>(j)]);
  }

  // Backward: raw-moment quotient-rule expansion per scale, accumulated
  // down the pooling pyramid.
  ValueGrad out;
  out.value = value;
  out.grad = Image(a.height(), a.width(), a.channels(), Domain::LatentSigned);

  for (int c = 0; c < channels; ++c) {
    Image carry;  // gradient w.r.t. the scale-j image of this channel
    for (int j = scales - 1; j >= 0; --j) {
      const ScaleStats& s =
          stats[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
      const Image& aj = pa[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
      const Image& bj = pb[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
      const int oh = s.cs.height(), ow = s.cs.width();
      const double nv = static_cast<double>(s.cs.size());
      const bool last = j + 1 == scales;

      Image grad_j = make_plane(aj.height(), aj.width());
      if (!floored[static_cast<std::size_t>(j)]) {
        const double sj = std::max(scale_value[static_cast<std::size_t>(j)],
                                   kScaleFloor);
        const double wj =
            value * gamma[static_cast<std::size_t>(j)] / sj / (nv * channels);
        Image g_ub = make_plane(oh, ow);
        Image g_sbb = make_plane(oh, ow);
        Image g_sab = make_plane(oh, ow);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < oh; ++y) {
          for (int x = 0; x < ow; ++x) {
            const std::size_t i =
                static_cast<std::size_t>(y) * ow + static_cast<std::size_t>(x);
            const double ua = s.ua[i], ub = s.ub[i];
            const double cs = s.cs[i], l = s.l[i];
            const double d2 = (s.saa[i] - ua * ua) + (s.sbb[i] - ub * ub) + kC2;
            const double d1 = ua * ua + ub * ub + kC1;
            const double dcs_dub = (-2.0 * ua + 2.0 * ub * cs) / d2;
            const double dcs_dsbb = -cs / d2;
            const double dcs_dsab = 2.0 / d2;
            if (last) {
              const double dl_dub = (2.0 * ua - 2.0 * ub * l) / d1;
              g_ub[i] = wj * (cs * dl_dub + l * dcs_dub);
              g_sbb[i] = wj * l * dcs_dsbb;
              g_sab[i] = wj * l * dcs_dsab;
            } else {
              g_ub[i] = wj * dcs_dub;
              g_sbb[i] = wj * dcs_dsbb;
              g_sab[i] = wj * dcs_dsab;
            }
          }
        }
        const Image adj_ub =
            valid_corr_adjoint(g_ub, aj.height(), aj.width(), taps);
        const Image adj_sbb =
            valid_corr_adjoint(g_sbb, aj.height(), aj.width(), taps);
        const Image adj_sab =
            valid_corr_adjoint(g_sab, aj.height(), aj.width(), taps);
        for (std::size_t i = 0; i < grad_j.size(); ++i) {
          grad_j[i] = adj_ub[i] + 2.0 * bj[i] * adj_sbb[i] + aj[i] * adj_sab[i];
        }
      }
      if (!carry.empty()) {
        const Image up = avg_pool2_adjoint(carry, aj.height(), aj.width());
        for (std::size_t i = 0; i < grad_j.size(); ++i) grad_j[i] += up[i];
      }
      carry = std::move(grad_j);
    }
    for (int y = 0; y < a.height(); ++y) {
      for (int x = 0; x < a.width(); ++x) {
        out.grad.at(y, x, c) = carry.at(y, x, 0);
      }
    }
  }
  return out;
}

double ssim_index(const Image& a, const Image& b) {
  check_ssim_inputs(a, b, "ssim");
  const std::vector<double> taps = window_taps();
  double acc = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    const ScaleStats s =
        scale_stats(extract_channel(a, c), extract_channel(b, c), taps);
    acc += plane_mean(multiply(s.l, s.cs));
  }
  return acc / a.channels();
}

// ---------------------------------------------------------------------------
// Perceptual distance.

namespace {

Tensor conv_forward(const Tensor& in, const FeatureExtractor::Layer& layer) {
  Tensor out;
  out.height = conv_out_dim(in.height);
  out.width = conv_out_dim(in.width);
  out.channels = layer.out_ch;
  out.v.assign(static_cast<std::size_t>(out.height) * out.width * out.channels,
               0.0);
  const int kernel = 3;
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < out.height; ++oy) {
    for (int ox = 0; ox < out.width; ++ox) {
      for (int co = 0; co < out.channels; ++co) {
        double acc = 0.0;
        for (int ci = 0; ci < layer.in_ch; ++ci) {
          for (int ky = 0; ky < kernel; ++ky) {
            const int iy = 2 * oy + ky - 1;
            if (iy < 0 || iy >= in.height) continue;
            for (int kx = 0; kx < kernel; ++kx) {
              const int ix = 2 * ox + kx - 1;
              if (ix < 0 || ix >= in.width) continue;
              acc += layer.w[((static_cast<std::size_t>(co) * layer.in_ch + ci) * 3 +
                              ky) *
                                 3 +
                             kx] *
                     in.at(iy, ix, ci);
            }
          }
        }
        // Half-wave rectification.
        out.v[(static_cast<std::size_t>(oy) * out.width + ox) * out.channels +
              co] = acc > 0.0 ? acc : 0.0;
      }
    }
  }
  return out;
}

Tensor conv_backward(const Tensor& delta, const Tensor& in_shape,
                     const FeatureExtractor::Layer& layer) {
  Tensor gin;
  gin.height = in_shape.height;
  gin.width = in_shape.width;
  gin.channels = in_shape.channels;
  gin.v.assign(in_shape.v.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < gin.height; ++y) {
    for (int x = 0; x < gin.width; ++x) {
      for (int ci = 0; ci < gin.channels; ++ci) {
        double acc = 0.0;
        for (int ky = 0; ky < 3; ++ky) {
          const int num_y = y + 1 - ky;
          if (num_y < 0 || num_y % 2 != 0) continue;
          const int oy = num_y / 2;
          if (oy >= delta.height) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int num_x = x + 1 - kx;
            if (num_x < 0 || num_x % 2 != 0) continue;
            const int ox = num_x / 2;
            if (ox >= delta.width) continue;
            for (int co = 0; co < delta.channels; ++co) {
              acc += layer.w[((static_cast<std::size_t>(co) * layer.in_ch + ci) *
                              3 +
                              ky) *
                                 3 +
                             kx] *
                     delta.at(oy, ox, co);
            }
          }
        }
        gin.v[(static_cast<std::size_t>(y) * gin.width + x) * gin.channels +
              ci] = acc;
      }
    }
  }
  return gin;
}

double tensor_sq_dist(const Tensor& p, const Tensor& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.v.size(); ++i) {
    const double d = p.v[i] - q.v[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

FeatureExtractor::FeatureExtractor(std::uint64_t seed) : seed_(seed) {
  const int widths[4] = {3, 8, 16, 32};
  Rng rng(seed);
  for (int s = 0; s < 3; ++s) {
    Layer layer;
    layer.in_ch = widths[s];
    layer.out_ch = widths[s + 1];
    const double scale = 1.0 / std::sqrt(static_cast<double>(layer.in_ch) * 9.0);
    layer.w.resize(static_cast<std::size_t>(layer.out_ch) * layer.in_ch * 9);
    for (double& w : layer.w) w = scale * rng.normal();
    layers_.push_back(std::move(layer));
  }
}

std::vector<Tensor> FeatureExtractor::forward(const Image& img) const {
  require_channels(img, 3, "FeatureExtractor");
  if (img.height() < 8 || img.width() < 8) {
    throw std::invalid_argument("FeatureExtractor: image must be at least 8x8");
  }
  std::vector<Tensor> stages;
  Tensor cur = image_to_tensor(img);
  for (const Layer& layer : layers_) {
    cur = conv_forward(cur, layer);
    stages.push_back(cur);
  }
  return stages;
}

ValueGrad perceptual(const Image& a, const Image& b,
                     const FeatureExtractor& fx) {
  require_same_shape(a, b, "perceptual");
  const std::vector<Tensor> za = fx.forward(a);
  const std::vector<Tensor> zb = fx.forward(b);

  ValueGrad out;
  for (std::size_t s = 0; s < za.size(); ++s) {
    out.value += tensor_sq_dist(za[s], zb[s]) /
                 static_cast<double>(za[s].v.size());
  }

  // Backprop: stage residuals join the carried gradient, rectifier masks
  // come from the stored (post-rectification) outputs.
  Tensor carry;
  const Tensor input = image_to_tensor(b);
  for (int s = static_cast<int>(za.size()) - 1; s >= 0; --s) {
    const Tensor& zs = zb[static_cast<std::size_t>(s)];
    const double n = static_cast<double>(zs.v.size());
    Tensor delta = zs;
    for (std::size_t i = 0; i < delta.v.size(); ++i) {
      double g = 2.0 * (zs.v[i] - za[static_cast<std::size_t>(s)].v[i]) / n;
      if (!carry.v.empty()) g += carry.v[i];
      delta.v[i] = zs.v[i] > 0.0 ? g : 0.0;
    }
    const Tensor& below = s == 0 ? input : zb[static_cast<std::size_t>(s - 1)];
    carry = conv_backward(delta, below, fx.layers_[static_cast<std::size_t>(s)]);
  }

  out.grad = Image(b.height(), b.width(), b.channels(), Domain::LatentSigned);
  for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] = carry.v[i];
  return out;
}

// ---------------------------------------------------------------------------
// Quality proxies.

namespace {
constexpr double kKappa = 1e-3;  // smooth-absolute rounding
}

ValueGrad colorfulness_score(const Image& x) {
  require_channels(x, 3, "colorfulness_score");
  const int h = x.height(), w = x.width();
  const double n = static_cast<double>(h) * w;
  ValueGrad out;
  out.grad = Image(h, w, 3, Domain::LatentSigned);
  out.value = par::row_sum(h, [&](int y) {
    double acc = 0.0;
    for (int xx = 0; xx < w; ++xx) {
      const double r = x.at(y, xx, 0), g = x.at(y, xx, 1), b = x.at(y, xx, 2);
      const double rg = r - g;
      const double yb = 0.5 * (r + g) - b;
      const double m = std::sqrt(rg * rg + yb * yb + kKappa * kKappa);
      acc += m - kKappa;
      out.grad.at(y, xx, 0) = (rg + 0.5 * yb) / (m * n);
      out.grad.at(y, xx, 1) = (-rg + 0.5 * yb) / (m * n);
      out.grad.at(y, xx, 2) = -yb / (m * n);
    }
    return acc;
  });
  out.value /= n;
  return out;
}

ValueGrad contrast_score(const Image& x) {
  require_channels(x, 3, "contrast_score");
  const int h = x.height(), w = x.width();
  const double n = static_cast<double>(h) * w;

  Image luma = make_plane(h, w);
  for (int y = 0; y < h; ++y) {
    for (int xx = 0; xx < w; ++xx) {
      luma.at(y, xx, 0) =
          (x.at(y, xx, 0) + x.at(y, xx, 1) + x.at(y, xx, 2)) / 3.0;
    }
  }

  // Forward differences; the last column/row has no difference and the
  // corresponding scatter weights stay zero.
  Image u = make_plane(h, w);  // d(value)/d(gx)
  Image v = make_plane(h, w);  // d(value)/d(gy)
  ValueGrad out;
  out.value = par::row_sum(h, [&](int y) {
    double acc = 0.0;
    for (int xx = 0; xx < w; ++xx) {
      const double gx = xx + 1 < w ? luma.at(y, xx + 1, 0) - luma.at(y, xx, 0) : 0.0;
      const double gy = y + 1 < h ? luma.at(y + 1, xx, 0) - luma.at(y, xx, 0) : 0.0;
      const double m = std::sqrt(gx * gx + gy * gy + kKappa * kKappa);
      acc += m - kKappa;
      u.at(y, xx, 0) = xx + 1 < w ? gx / (m * n) : 0.0;
      v.at(y, xx, 0) = y + 1 < h ? gy / (m * n) : 0.0;
    }
    return acc;
  });
  out.value /= n;

  out.grad = Image(h, w, 3, Domain::LatentSigned);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int xx = 0; xx < w; ++xx) {
      double gl = 0.0;
      if (xx >= 1) gl += u.at(y, xx - 1, 0);
      if (xx + 1 < w) gl -= u.at(y, xx, 0);
      if (y >= 1) gl += v.at(y - 1, xx, 0);
      if (y + 1 < h) gl -= v.at(y, xx, 0);
      gl /= 3.0;
      out.grad.at(y, xx, 0) = gl;
      out.grad.at(y, xx, 1) = gl;
      out.grad.at(y, xx, 2) = gl;
    }
  }
  return out;
}

ValueGrad quality_proxy(const Image& x) {
  ValueGrad c = colorfulness_score(x);
  ValueGrad s = contrast_score(x);
  ValueGrad out;
  out.value = 0.5 * c.value + 0.5 * s.value;
  out.grad = Image(x.height(), x.width(), 3, Domain::LatentSigned);
  for (std::size_t i = 0; i < out.grad.size(); ++i) {
    out.grad[i] = 0.5 * c.grad[i] + 0.5 * s.grad[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Total guidance loss.

TotalLoss total_loss(const Image& x_hat, const Image& x, const LossWeights& w,
                     const FeatureExtractor& fx) {
  require_same_shape(x_hat, x, "total_loss");
  TotalLoss out;
  out.grad = Image(x.height(), x.width(), x.channels(), Domain::LatentSigned);

  const ValueGrad m = mae(x_hat, x);
  out.report.mae = m.value;
  for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] = m.grad[i];

  if (w.lambda1 != 0.0) {
    const ValueGrad s = ms_ssim(x_hat, x);
    out.report.ms_ssim = s.value;
    for (std::size_t i = 0; i < out.grad.size(); ++i) {
      out.grad[i] -= w.lambda1 * s.grad[i];
    }
  }
  if (w.lambda2 != 0.0) {
    const ValueGrad p = perceptual(x_hat, x, fx);
    out.report.perceptual = p.value;
    for (std::size_t i = 0; i < out.grad.size(); ++i) {
      out.grad[i] += w.lambda2 * p.grad[i];
    }
  }
  if (w.lambda3 != 0.0) {
    const ValueGrad q = colorfulness_score(x);
    out.report.quality_a = q.value;
    for (std::size_t i = 0; i < out.grad.size(); ++i) {
      out.grad[i] -= w.lambda3 * q.grad[i];
    }
  }
  if (w.lambda4 != 0.0) {
    const ValueGrad q = contrast_score(x);
    out.report.quality_b = q.value;
    for (std::size_t i = 0; i < out.grad.size(); ++i) {
      out.grad[i] -= w.lambda4 * q.grad[i];
    }
  }
  out.report.total = out.report.mae - w.lambda1 * out.report.ms_ssim +
                     w.lambda2 * out.report.perceptual -
                     w.lambda3 * out.report.quality_a -
                     w.lambda4 * out.report.quality_b;
  return out;
}

// ---------------------------------------------------------------------------
// Gradient checking.

double gradcheck(const std::function<ValueGrad(const Image&)>& f,
                 const Image& point, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("gradcheck: step must be positive");
  }
  const ValueGrad analytic = f(point);
  require_same_shape(analytic.grad, point, "gradcheck (gradient shape)");

  const std::size_t n = point.size();
  const std::size_t count = std::min<std::size_t>(n, 64);
  double worst = 0.0;
  Image probe = point;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = k * n / count;
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = f(probe).value;
    probe[i] = saved - h;
    const double down = f(probe).value;
    probe[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double ana = analytic.grad[i];
    const double err = std::fabs(numeric - ana) /
                       std::max({std::fabs(numeric), std::fabs(ana), 1e-8});
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace uwdiff
