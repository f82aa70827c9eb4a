#pragma once

#include <cstddef>
#include <vector>

namespace uwdiff {

// Value-domain tag for pixel data. Display01 images carry display samples in
// [0, 1]; LatentSigned images are the sampler workspace (nominal [-1, 1],
// excursions permitted) and double as the container for unbounded per-pixel
// quantities such as gradients or Lab triples. Range validation happens at
// the conversion and I/O boundaries, not on every arithmetic op.
enum class Domain { Display01, LatentSigned };

// Dense row-major image: samples laid out (row, column, channel).
// channels is 1 or 3. Samples are doubles; the guidance losses are probed
// with finite differences down to 1e-6 relative error and the diffusion
// inversion identities are asserted to 1e-5 at alpha_bar ~ 1e-5, neither of
// which survives 32-bit storage.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, Domain domain);

  static Image constant(int height, int width, int channels, double value,
                        Domain domain);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  Domain domain() const { return domain_; }
  void set_domain(Domain domain) { domain_ = domain; }

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(int y, int x, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int y, int x, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  Domain domain_ = Domain::Display01;
  std::vector<double> data_;
};

// Throws std::invalid_argument naming `what` when shapes differ.
void require_same_shape(const Image& a, const Image& b, const char* what);
void require_channels(const Image& img, int channels, const char* what);

// Display01 -> LatentSigned, x -> 2x - 1. Rejects wrong domain tags and
// samples outside [0, 1].
Image to_latent(const Image& img);

// LatentSigned -> Display01, x -> clamp((x + 1) / 2, 0, 1).
Image from_latent(const Image& img);

// a + s * b, elementwise; result inherits a's domain tag.
Image add_scaled(const Image& a, const Image& b, double s);

// Deterministic reductions (fixed accumulation order at any thread count).
double l2_norm(const Image& img);
double max_abs(const Image& img);
double mean(const Image& img);

}  // namespace uwdiff
