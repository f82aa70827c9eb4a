#include "uwdiff/pseudo_label.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "uwdiff/degradation.hpp"
#include "uwdiff/stats.hpp"

namespace uwdiff {

Image IdentityLabeler::enhance(const Image& y) const { return y; }

Image GrayWorldContrastLabeler::enhance(const Image& y) const {
  require_channels(y, 3, "grayworld-contrast");
  const int h = y.height(), w = y.width();
  const double n = static_cast<double>(h) * w;

  double channel_mean[3] = {0.0, 0.0, 0.0};
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) {
      for (int c = 0; c < 3; ++c) channel_mean[c] += y.at(yy, xx, c);
    }
  }
  for (double& m : channel_mean) m /= n;
  const double grand = (channel_mean[0] + channel_mean[1] + channel_mean[2]) / 3.0;

  double gain[3];
  for (int c = 0; c < 3; ++c) {
    gain[c] = channel_mean[c] > 0.0
                  ? std::clamp(grand / channel_mean[c], 0.5, 3.0)
                  : 1.0;
  }

  Image out(h, w, 3, Domain::Display01);
  std::vector<double> samples(static_cast<std::size_t>(h) * w);
  for (int c = 0; c < 3; ++c) {
    for (int yy = 0; yy < h; ++yy) {
      for (int xx = 0; xx < w; ++xx) {
        samples[static_cast<std::size_t>(yy) * w + xx] = y.at(yy, xx, c) * gain[c];
      }
    }
    const double lo = percentile(samples, 0.01);
    const double hi = percentile(samples, 0.99);
    const double range = hi - lo;
    for (int yy = 0; yy < h; ++yy) {
      for (int xx = 0; xx < w; ++xx) {
        const double v = samples[static_cast<std::size_t>(yy) * w + xx];
        const double stretched = range < 1e-6 ? v : (v - lo) / range;
        out.at(yy, xx, c) = std::clamp(stretched, 0.0, 1.0);
      }
    }
  }
  return out;
}

Image DcpInversionLabeler::enhance(const Image& y) const {
  require_channels(y, 3, "dcp-inversion");
  const Image a = estimate_background_light(y);
  const Image t = estimate_transmission(y, a);
  Image out(y.height(), y.width(), 3, Domain::Display01);
  for (int yy = 0; yy < y.height(); ++yy) {
    for (int xx = 0; xx < y.width(); ++xx) {
      const double tv = std::max(t.at(yy, xx, 0), 0.1);
      for (int c = 0; c < 3; ++c) {
        const double v =
            (y.at(yy, xx, c) - (1.0 - t.at(yy, xx, 0)) * a.at(yy, xx, c)) / tv;
        out.at(yy, xx, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

std::unique_ptr<PseudoLabeler> make_labeler(const std::string& name) {
  if (name == "identity") return std::make_unique<IdentityLabeler>();
  if (name == "grayworld-contrast") {
    return std::make_unique<GrayWorldContrastLabeler>();
  }
  if (name == "dcp-inversion") return std::make_unique<DcpInversionLabeler>();
  throw std::invalid_argument("unknown pseudo-labeler: " + name);
}

}  // namespace uwdiff
