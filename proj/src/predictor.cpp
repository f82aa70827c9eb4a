#include "uwdiff/predictor.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "uwdiff/parallel.hpp"

namespace uwdiff {

GaussianWorldPredictor::GaussianWorldPredictor(const NoiseSchedule& schedule,
                                               double mean, double variance,
                                               VariancePolicy policy)
    : schedule_(schedule), mean_(mean), variance_(variance), policy_(policy) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument(
        "GaussianWorldPredictor: variance must be positive");
  }
}

Image GaussianWorldPredictor::posterior_mean_x0(const Image& x_t, int t) const {
  const double ab = schedule_.alpha_bar(t);
  const double denom = ab * variance_ + (1.0 - ab);
  const double p = std::sqrt(ab) * variance_ / denom;
  const double q = (1.0 - ab) * mean_ / denom;
  Image out(x_t.height(), x_t.width(), x_t.channels(), x_t.domain());
  const std::size_t n = x_t.size();
#pragma omp parallel for schedule(static) if (n >= par::kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    out[static_cast<std::size_t>(i)] = p * x_t[static_cast<std::size_t>(i)] + q;
  }
  return out;
}

Image GaussianWorldPredictor::predict(const Image& x_t, int t) const {
  const double ab = schedule_.alpha_bar(t);
  if (!(ab < 1.0)) {
    throw std::invalid_argument(
        "GaussianWorldPredictor: predict needs t >= 1 (alpha_bar < 1)");
  }
  const double sqrt_ab = std::sqrt(ab);
  const double inv_sqrt_1mab = 1.0 / std::sqrt(1.0 - ab);
  const Image x0 = posterior_mean_x0(x_t, t);
  Image out(x_t.height(), x_t.width(), x_t.channels(), x_t.domain());
  const std::size_t n = x_t.size();
#pragma omp parallel for schedule(static) if (n >= par::kParallelCutoff)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const std::size_t j = static_cast<std::size_t>(i);
    out[j] = (x_t[j] - sqrt_ab * x0[j]) * inv_sqrt_1mab;
  }
  return out;
}

namespace {

void read_exact(std::ifstream& in, void* dst, std::size_t bytes,
                const std::string& path) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<std::size_t>(in.gcount()) != bytes) {
    throw std::runtime_error("truncated predictor file: " + path);
  }
}

std::int32_t to_le32(std::int32_t v) {
  // The file is little-endian; this build targets little-endian hosts and
  // the byte-level tests would catch a mismatch.
  return v;
}

}  // namespace

PrecomputedPredictor PrecomputedPredictor::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open predictor file: " + path);
  }
  std::int32_t header[6];
  read_exact(in, header, sizeof(header), path);
  if (header[0] != kMagic) {
    throw std::runtime_error("bad predictor file magic: " + path);
  }
  if (header[1] != kVersion) {
    throw std::runtime_error("unsupported predictor file version: " + path);
  }
  PrecomputedPredictor p;
  p.steps_ = header[2];
  p.height_ = header[3];
  p.width_ = header[4];
  p.channels_ = header[5];
  if (p.steps_ < 1 || p.height_ < 1 || p.width_ < 1 ||
      (p.channels_ != 1 && p.channels_ != 3)) {
    throw std::runtime_error("bad predictor file header fields: " + path);
  }
  const std::size_t count = static_cast<std::size_t>(p.steps_) * p.height_ *
                            p.width_ * p.channels_;
  p.samples_.resize(count);
  read_exact(in, p.samples_.data(), count * sizeof(float), path);
  char extra;
  if (in.read(&extra, 1); in.gcount() != 0) {
    throw std::runtime_error("trailing bytes in predictor file: " + path);
  }
  return p;
}

Image PrecomputedPredictor::predict(const Image& x_t, int t) const {
  if (t < 1 || t > steps_) {
    throw std::out_of_range("PrecomputedPredictor: timestep out of range");
  }
  if (x_t.height() != height_ || x_t.width() != width_ ||
      x_t.channels() != channels_) {
    throw std::invalid_argument(
        "PrecomputedPredictor: sample shape does not match stored grids");
  }
  Image out(height_, width_, channels_, x_t.domain());
  const std::size_t grid = out.size();
  const float* src = samples_.data() + grid * static_cast<std::size_t>(t - 1);
  for (std::size_t i = 0; i < grid; ++i) out[i] = static_cast<double>(src[i]);
  return out;
}

void write_predictor_file(const std::string& path,
                          const std::vector<Image>& grids) {
  if (grids.empty()) {
    throw std::invalid_argument("write_predictor_file: no grids");
  }
  for (const Image& g : grids) {
    require_same_shape(grids.front(), g, "write_predictor_file");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open predictor file for writing: " + path);
  }
  const std::int32_t header[6] = {
      to_le32(PrecomputedPredictor::kMagic),
      to_le32(PrecomputedPredictor::kVersion),
      to_le32(static_cast<std::int32_t>(grids.size())),
      to_le32(grids.front().height()),
      to_le32(grids.front().width()),
      to_le32(grids.front().channels())};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::vector<float> row(grids.front().size());
  for (const Image& g : grids) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      row[i] = static_cast<float>(g[i]);
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) {
    throw std::runtime_error("short write to predictor file: " + path);
  }
}

}  // namespace uwdiff
