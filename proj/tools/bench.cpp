// Compares the OpenMP kernels against their serial reference twins on a
// representative workload and reports timings plus the worst divergence.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "uwdiff/filters.hpp"
#include "uwdiff/image.hpp"
#include "uwdiff/rng.hpp"

namespace {

using uwdiff::Image;

double time_best_of(int repeats, const std::function<Image()>& f, Image* out) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    Image result = f();
    const auto stop = std::chrono::steady_clock::now();
    best = std::min(
        best, std::chrono::duration<double, std::milli>(stop - start).count());
    *out = std::move(result);
  }
  return best;
}

double max_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::fabs(a[i] - b[i]));
  }
  return m;
}

void report(const char* name, const std::function<Image()>& parallel,
            const std::function<Image()>& serial) {
  Image pout, sout;
  const double pt = time_best_of(3, parallel, &pout);
  const double st = time_best_of(3, serial, &sout);
  std::printf("%-24s serial %8.2f ms   parallel %8.2f ms   speedup %5.2fx   "
              "max|diff| %.3g\n",
              name, st, pt, st / pt, max_diff(pout, sout));
}

}  // namespace

int main() {
  uwdiff::Rng rng(7);
  Image noise = rng.normal_image(512, 512, 3, uwdiff::Domain::LatentSigned);
  // Squash into [0, 1] so the fixture resembles display data.
  Image img(512, 512, 3, uwdiff::Domain::Display01);
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = 0.5 + 0.5 * std::tanh(noise[i]);
  }
  Image gray(512, 512, 1, uwdiff::Domain::Display01);
  for (int y = 0; y < 512; ++y) {
    for (int x = 0; x < 512; ++x) gray.at(y, x, 0) = img.at(y, x, 0);
  }

  std::printf("512x512 kernel comparison (best of 3)\n");
  report(
      "gaussian_blur s=4", [&] { return uwdiff::gaussian_blur(img, 4.0); },
      [&] { return uwdiff::reference::gaussian_blur(img, 4.0); });
  report(
      "min_filter r=7", [&] { return uwdiff::min_filter(gray, 7); },
      [&] { return uwdiff::reference::min_filter(gray, 7); });
  report(
      "resize 512->256",
      [&] { return uwdiff::resize_bilinear(img, 256, 256); },
      [&] { return uwdiff::reference::resize_bilinear(img, 256, 256); });
  return 0;
}
