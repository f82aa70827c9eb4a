#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "uwdiff/image.hpp"
#include "uwdiff/losses.hpp"
#include "uwdiff/rng.hpp"

using namespace uwdiff;

namespace {

Image random_image(int h, int w, int c, std::uint64_t seed) {
  Rng rng(seed);
  Image img(h, w, c, Domain::Display01);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = rng.uniform();
  return img;
}

// b = a shifted by at least `step` per coordinate, alternating sign, so no
// coordinate sits on the MAE tie.
Image shifted_off_ties(const Image& a, double step, std::uint64_t seed) {
  Rng rng(seed);
  Image b = a;
  b.set_domain(a.domain());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double sgn = rng.uniform() < 0.5 ? -1.0 : 1.0;
    b[i] = a[i] + sgn * (step + 0.05 * rng.uniform());
  }
  return b;
}

double max_diff(const Image& a, const Image& b) {
  REQUIRE(a.same_shape(b));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("gradcheck calibrates on a linear function") {
  Image coef = random_image(8, 8, 3, 1);
  auto linear = [&](const Image& x) {
    ValueGrad out;
    out.grad = coef;
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += coef[i] * x[i];
    out.value = acc;
    return out;
  };
  const Image point = random_image(8, 8, 3, 2);
  CHECK(gradcheck(linear, point, 1e-3) < 1e-8);
  // Deterministic: repeated runs agree bitwise.
  CHECK(gradcheck(linear, point, 1e-3) == gradcheck(linear, point, 1e-3));
}

TEST_CASE("mae values and gradient") {
  const Image a = random_image(16, 16, 3, 3);
  CHECK(mae(a, a).value == 0.0);
  CHECK(max_abs(mae(a, a).grad) == 0.0);

  const Image ones = Image::constant(4, 4, 1, 1.0, Domain::Display01);
  const Image zeros = Image::constant(4, 4, 1, 0.0, Domain::Display01);
  CHECK(mae(ones, zeros).value == doctest::Approx(1.0));
  // grad_b = -sign(a - b)/N, here a > b everywhere.
  CHECK(mae(ones, zeros).grad[0] == doctest::Approx(-1.0 / 16.0));

  const Image b = shifted_off_ties(a, 0.1, 4);
  auto f = [&](const Image& x) { return mae(a, x); };
  CHECK(gradcheck(f, b, 1e-3) < 1e-6);

  CHECK_THROWS_AS(mae(a, ones), std::invalid_argument);
}

TEST_CASE("ms_ssim identities") {
  const Image a = random_image(32, 32, 3, 5);
  const ValueGrad same = ms_ssim(a, a);
  CHECK(same.value == 1.0);  // exact

  const Image b = random_image(32, 32, 3, 6);
  CHECK(ms_ssim(a, b).value == ms_ssim(b, a).value);
  CHECK(ms_ssim(a, b).value < 1.0);

  // Mild noise scores above heavy noise.
  Rng rng(7);
  Image mild = a, heavy = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double z = rng.normal();
    mild[i] = std::clamp(a[i] + 0.02 * z, 0.0, 1.0);
    heavy[i] = std::clamp(a[i] + 0.3 * z, 0.0, 1.0);
  }
  CHECK(ms_ssim(a, mild).value > ms_ssim(a, heavy).value);

  CHECK_THROWS_AS(ms_ssim(Image::constant(10, 64, 3, 0.5, Domain::Display01),
                          Image::constant(10, 64, 3, 0.5, Domain::Display01)),
                  std::invalid_argument);
}

TEST_CASE("ms_ssim truncates to a single scale on small images") {
  // 16x16 halves to 8 < 11, so only the finest scale survives and its
  // weight renormalizes to 1: the result is exactly the single-scale index
  // whenever that index clears the positivity floor.
  const Image a = random_image(16, 16, 3, 8);
  Rng rng(9);
  Image b = a;
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i] = std::clamp(a[i] + 0.05 * rng.normal(), 0.0, 1.0);
  }
  const double si = ssim_index(a, b);
  REQUIRE(si > 0.1);
  CHECK(ms_ssim(a, b).value == si);

  // An unrelated pair scores negative single-scale similarity; the product
  // form clamps each scale factor at 1e-6 from below instead.
  const Image c = random_image(16, 16, 3, 9);
  REQUIRE(ssim_index(a, c) < 0.0);
  CHECK(ms_ssim(a, c).value == 1e-6);
}

TEST_CASE("ms_ssim gradient vs finite differences") {
  const Image a = random_image(64, 64, 3, 10);
  const Image b = random_image(64, 64, 3, 11);
  auto f = [&](const Image& x) { return ms_ssim(a, x); };
  CHECK(gradcheck(f, b, 1e-3) < 1e-3);
}

TEST_CASE("ssim_index matches the naive sliding-window oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Image a = random_image(16, 16, 3, 100 + seed);
    const Image b = random_image(16, 16, 3, 200 + seed);
    CHECK(std::abs(ssim_index(a, b) - oracles::ssim_naive(a, b)) < 1e-6);
  }
  const Image a = random_image(13, 19, 1, 300);
  const Image b = random_image(13, 19, 1, 301);
  CHECK(std::abs(ssim_index(a, b) - oracles::ssim_naive(a, b)) < 1e-6);
  CHECK(ssim_index(a, a) == 1.0);
}

TEST_CASE("feature extractor determinism and shapes") {
  const FeatureExtractor fa(kDefaultFeatureSeed);
  const FeatureExtractor fb(kDefaultFeatureSeed);
  const Image img = random_image(16, 16, 3, 12);
  const std::vector<Tensor> sa = fa.forward(img);
  const std::vector<Tensor> sb = fb.forward(img);
  REQUIRE(sa.size() == 3u);
  CHECK(sa[0].height == 8);
  CHECK(sa[0].width == 8);
  CHECK(sa[0].channels == 8);
  CHECK(sa[1].height == 4);
  CHECK(sa[1].channels == 16);
  CHECK(sa[2].height == 2);
  CHECK(sa[2].channels == 32);
  for (int s = 0; s < 3; ++s) {
    REQUIRE(sa[s].v.size() == sb[s].v.size());
    for (std::size_t i = 0; i < sa[s].v.size(); ++i) {
      CHECK(sa[s].v[i] == sb[s].v[i]);
      CHECK(sa[s].v[i] >= 0.0);  // half-rectified
    }
  }
  // A different seed gives different features.
  const FeatureExtractor fc(1234);
  const std::vector<Tensor> sc = fc.forward(img);
  double diff = 0.0;
  for (std::size_t i = 0; i < sc[0].v.size(); ++i)
    diff = std::max(diff, std::abs(sc[0].v[i] - sa[0].v[i]));
  CHECK(diff > 0.0);

  // Odd sizes round up under stride 2 with unit zero-padding.
  const std::vector<Tensor> odd = fa.forward(random_image(9, 13, 3, 13));
  CHECK(odd[0].height == 5);
  CHECK(odd[0].width == 7);

  CHECK_THROWS_AS(fa.forward(Image::constant(16, 16, 1, 0.5,
                                             Domain::Display01)),
                  std::invalid_argument);
  CHECK_THROWS_AS(fa.forward(Image::constant(4, 16, 3, 0.5,
                                             Domain::Display01)),
                  std::invalid_argument);
}

TEST_CASE("perceptual distance") {
  const FeatureExtractor fx;
  const Image a = random_image(16, 16, 3, 14);
  CHECK(perceptual(a, a, fx).value == 0.0);
  CHECK(max_abs(perceptual(a, a, fx).grad) == 0.0);

  const Image b = random_image(16, 16, 3, 15);
  CHECK(perceptual(a, b, fx).value > 0.0);

  const Image point = random_image(32, 32, 3, 16);
  const Image target = random_image(32, 32, 3, 17);
  auto g = [&](const Image& x) { return perceptual(target, x, fx); };
  // A 1e-3 step can push a pre-activation across the rectifier kink, where
  // central differences diverge from the (correct) subgradient; 1e-4 stays
  // on one side at every probed coordinate.
  CHECK(gradcheck(g, point, 1e-4) < 1e-3);
}

TEST_CASE("quality proxies") {
  const Image flat = Image::constant(16, 16, 3, 0.42, Domain::Display01);
  CHECK(colorfulness_score(flat).value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(contrast_score(flat).value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(quality_proxy(flat).value == doctest::Approx(0.0).epsilon(1e-12));

  const Image img = random_image(16, 16, 3, 18);
  // Colorfulness is pixelwise, so any spatial permutation preserves it.
  Image flipped(16, 16, 3, Domain::Display01);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (int c = 0; c < 3; ++c)
        flipped.at(y, x, c) = img.at(y, 15 - x, c);
  CHECK(colorfulness_score(img).value ==
        doctest::Approx(colorfulness_score(flipped).value).epsilon(1e-12));
  // Contrast uses forward differences, which pair +x with +y at each pixel:
  // a flip breaks that pairing, but a transpose just swaps the two terms
  // inside the magnitude, so the score is transpose-invariant.
  Image transposed(16, 16, 3, Domain::Display01);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (int c = 0; c < 3; ++c) transposed.at(y, x, c) = img.at(x, y, c);
  CHECK(contrast_score(img).value ==
        doctest::Approx(contrast_score(transposed).value).epsilon(1e-12));

  CHECK(quality_proxy(img).value ==
        doctest::Approx(0.5 * colorfulness_score(img).value +
                        0.5 * contrast_score(img).value));

  CHECK(gradcheck([](const Image& x) { return colorfulness_score(x); }, img,
                  1e-4) < 1e-3);
  CHECK(gradcheck([](const Image& x) { return contrast_score(x); }, img,
                  1e-4) < 1e-3);
  CHECK(gradcheck([](const Image& x) { return quality_proxy(x); }, img,
                  1e-4) < 1e-3);

  CHECK_THROWS_AS(quality_proxy(Image::constant(8, 8, 1, 0.5,
                                                Domain::Display01)),
                  std::invalid_argument);
}

TEST_CASE("total loss composition") {
  const FeatureExtractor fx;
  const Image x_hat = random_image(32, 32, 3, 19);
  const Image x = random_image(32, 32, 3, 20);

  LossWeights w;  // defaults
  CHECK(w.lambda1 == 1.0);
  CHECK(w.lambda2 == 0.005);
  CHECK(w.lambda3 == 0.001);
  CHECK(w.lambda4 == 1e-5);

  const TotalLoss tl = total_loss(x_hat, x, w, fx);
  CHECK(tl.report.total ==
        doctest::Approx(tl.report.mae - w.lambda1 * tl.report.ms_ssim +
                        w.lambda2 * tl.report.perceptual -
                        w.lambda3 * tl.report.quality_a -
                        w.lambda4 * tl.report.quality_b)
            .epsilon(1e-9));

  // Identical inputs with the quality terms off: exactly -lambda1.
  LossWeights sim = w;
  sim.lambda3 = 0.0;
  sim.lambda4 = 0.0;
  CHECK(total_loss(x_hat, x_hat, sim, fx).report.total == -w.lambda1);

  // All weights zero reduces to plain MAE.
  LossWeights zero{0.0, 0.0, 0.0, 0.0};
  const TotalLoss only_mae = total_loss(x_hat, x, zero, fx);
  const ValueGrad m = mae(x_hat, x);
  CHECK(only_mae.report.total == m.value);
  CHECK(max_diff(only_mae.grad, m.grad) == 0.0);
  // Skipped terms leave their report slots untouched.
  CHECK(only_mae.report.ms_ssim == 0.0);
  CHECK(only_mae.report.perceptual == 0.0);
  CHECK(only_mae.report.quality_a == 0.0);
  CHECK(only_mae.report.quality_b == 0.0);

  // Doubling lambda2 doubles exactly the perceptual contribution.
  LossWeights w2 = w;
  w2.lambda2 = 2.0 * w.lambda2;
  const TotalLoss t2 = total_loss(x_hat, x, w2, fx);
  CHECK(t2.report.total - tl.report.total ==
        doctest::Approx(w.lambda2 * tl.report.perceptual).epsilon(1e-12));

  auto f = [&](const Image& img) {
    TotalLoss t = total_loss(x_hat, img, w, fx);
    return ValueGrad{t.report.total, std::move(t.grad)};
  };
  const Image point = shifted_off_ties(x, 0.05, 21);
  CHECK(gradcheck(f, point, 1e-4) < 1e-3);
}
