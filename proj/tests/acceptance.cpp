// Acceptance gate: end-to-end checks of the numerical contracts this library
// ships with. Each check prints one PASS/FAIL line; the process exits
// nonzero if any check fails. Runs from any directory; writes only under the
// system temp directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uwdiff/degradation.hpp"
#include "uwdiff/diffusion.hpp"
#include "uwdiff/filters.hpp"
#include "uwdiff/guidance.hpp"
#include "uwdiff/image.hpp"
#include "uwdiff/image_io.hpp"
#include "uwdiff/losses.hpp"
#include "uwdiff/metrics.hpp"
#include "uwdiff/predictor.hpp"
#include "uwdiff/presets.hpp"
#include "uwdiff/pseudo_label.hpp"
#include "uwdiff/rng.hpp"
#include "uwdiff/run.hpp"
#include "uwdiff/runconfig.hpp"
#include "uwdiff/schedule.hpp"

using namespace uwdiff;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-38s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

Image random_display(int h, int w, int ch, std::uint64_t seed) {
  Rng rng(seed);
  Image img(h, w, ch, Domain::Display01);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = rng.uniform();
  return img;
}

// Perturbation that keeps |a - b| away from zero so sign-based gradients
// stay stable under the finite-difference probes.
Image shifted_off_ties(const Image& a, double step, std::uint64_t seed) {
  Rng rng(seed);
  Image b = a;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double delta = step + 0.05 * rng.uniform();
    b[i] += (b[i] > 0.5 ? -delta : delta);
  }
  return b;
}

double max_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Image dotted_scene(int h, int w, std::uint64_t seed, int spacing = 8) {
  Rng rng(seed);
  Image x(h, w, 3, Domain::Display01);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.2 + 0.6 * rng.uniform();
  for (int y = spacing / 2; y < h; y += spacing)
    for (int xx = spacing / 2; xx < w; xx += spacing)
      for (int c = 0; c < 3; ++c) x.at(y, xx, c) = 0.0;
  return x;
}

// Smooth colorful scene with shaded pockets; unlike iid noise, its local
// contrast sits in the range that enhancement genuinely raises, which is
// what the no-reference quality scores reward.
Image smooth_scene(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  Image x(h, w, 3, Domain::Display01);
  const auto normalized_field = [&](double sigma) {
    Image n(h, w, 1, Domain::LatentSigned);
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = rng.normal();
    Image sm = gaussian_blur(n, sigma);
    double lo = sm[0], hi = sm[0];
    for (std::size_t i = 0; i < sm.size(); ++i) {
      lo = std::min(lo, sm[i]);
      hi = std::max(hi, sm[i]);
    }
    const double range = std::max(hi - lo, 1e-12);
    for (std::size_t i = 0; i < sm.size(); ++i) sm[i] = (sm[i] - lo) / range;
    return sm;
  };
  for (int c = 0; c < 3; ++c) {
    const Image f = normalized_field(h / 10.0);
    for (int y = 0; y < h; ++y)
      for (int xx = 0; xx < w; ++xx)
        x.at(y, xx, c) = 0.2 + 0.7 * f.at(y, xx, 0);
  }
  const Image shade = normalized_field(h / 8.0);
  for (int y = 0; y < h; ++y)
    for (int xx = 0; xx < w; ++xx) {
      const double s = 0.25 + 0.75 * shade.at(y, xx, 0);
      for (int c = 0; c < 3; ++c) x.at(y, xx, c) *= s;
    }
  return x;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("uwdiff_gate_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

void check_forward_inverse() {
  const auto start = std::chrono::steady_clock::now();
  const NoiseSchedule sched = NoiseSchedule::linear(1000);
  Rng rng(101);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int t = 1 + static_cast<int>(rng.uniform() * 1000.0);
    const Image x0 = rng.normal_image(16, 16, 3, Domain::LatentSigned);
    const Image eps = rng.normal_image(16, 16, 3, Domain::LatentSigned);
    const Image x_t = forward_sample(x0, std::min(t, 1000), eps, sched);
    const Image back = predict_x0(x_t, eps, std::min(t, 1000), sched);
    worst = std::max(worst, max_diff(back, x0));
  }
  const double secs = seconds_since(start);
  report("forward/inverse consistency", worst < 1e-5 && secs < 1.0,
         fmt("max err %.3g (tol 1e-5), %.2fs (budget 1s)", worst, secs));
}

void check_unguided_moments() {
  const auto start = std::chrono::steady_clock::now();
  const int kT = 50;
  const NoiseSchedule sched = NoiseSchedule::linear(kT);
  const double m = 0.7, v = 0.25;
  const GaussianWorldPredictor pred(sched, m, v);

  oracles::ScalarMoments want{0.0, 1.0};
  for (int t = kT; t >= 1; --t) {
    oracles::StepMap map = oracles::unguided_step_map(
        t, m, v, VariancePolicy::FixedPosterior, sched);
    if (t == 1) map.sigma2 = 0.0;
    want = oracles::push(want, map);
  }

  const int kChains = 2000;
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(kChains) * 16);
  for (int i = 0; i < kChains; ++i) {
    Rng rng(41000 + static_cast<std::uint64_t>(i));
    Image x = rng.normal_image(4, 4, 1, Domain::LatentSigned);
    for (int t = kT; t >= 1; --t) {
      ReverseStepDistribution dist = reverse_distribution(x, t, pred, sched);
      if (t == 1) dist.sigma2 = 0.0;
      x = ddpm_step(dist, rng);
    }
    for (std::size_t j = 0; j < x.size(); ++j) samples.push_back(x[j]);
  }
  const double n = static_cast<double>(samples.size());
  double mean_mc = 0.0;
  for (double s : samples) mean_mc += s;
  mean_mc /= n;
  double var_mc = 0.0;
  for (double s : samples) var_mc += (s - mean_mc) * (s - mean_mc);
  var_mc /= (n - 1.0);

  const double se = std::sqrt(want.var / n);
  const double mean_err = std::abs(mean_mc - want.mean);
  const double var_rel = std::abs(var_mc - want.var) / want.var;
  const double secs = seconds_since(start);
  report("unguided chain terminal moments",
         mean_err <= 3.0 * se && var_rel <= 0.05 && secs < 30.0,
         fmt("mean err %.2g (3se %.2g), var rel %.3f (tol 0.05)", mean_err,
             3.0 * se, var_rel) +
             fmt(", %.1fs (budget 30s)", secs));
}

void check_guided_closed_form() {
  const auto start = std::chrono::steady_clock::now();
  const int kT = 50;
  const NoiseSchedule sched = NoiseSchedule::linear(kT);
  const double m = 0.2, v = 0.6, tau = 0.4;
  const GaussianWorldPredictor pred(sched, m, v);

  bool ok = true;
  std::string detail;
  for (double s : {0.1, 1.0}) {
    GuidanceConfig cfg;
    cfg.variant = GuidanceVariant::X0Natural;
    cfg.sampler = SamplerKind::Ddpm;
    cfg.steps = kT;
    cfg.scale = s;

    // Deterministic: project each library step onto its scalar affine map
    // by probing two constant latents, then propagate moments and compare
    // against the closed-form recursion step by step.
    QuadraticObjective probe_obj(
        Image::constant(1, 1, 1, tau, Domain::LatentSigned));
    const Image xa = Image::constant(1, 1, 1, 0.9, Domain::LatentSigned);
    const Image xb = Image::constant(1, 1, 1, -0.5, Domain::LatentSigned);
    oracles::ScalarMoments lib{0.0, 1.0}, want{0.0, 1.0};
    double worst = 0.0;
    for (int t = kT; t >= 1; --t) {
      const ReverseStepDistribution da =
          guided_step_distribution(xa, t, probe_obj, cfg, pred, sched);
      const ReverseStepDistribution db =
          guided_step_distribution(xb, t, probe_obj, cfg, pred, sched);
      oracles::StepMap probed;
      probed.c = (da.mu[0] - db.mu[0]) / (0.9 - -0.5);
      probed.d = da.mu[0] - probed.c * 0.9;
      probed.sigma2 = t == 1 ? 0.0 : da.sigma2;

      oracles::QuadraticGuidance g;
      g.target = tau;
      g.scale = s;
      g.on_x0 = true;
      oracles::StepMap closed = oracles::guided_quadratic_step_map(
          t, m, v, g, VariancePolicy::FixedPosterior, sched);
      if (t == 1) closed.sigma2 = 0.0;

      lib = oracles::push(lib, probed);
      want = oracles::push(want, closed);
      worst = std::max({worst, std::abs(lib.mean - want.mean),
                        std::abs(lib.var - want.var)});
    }
    if (worst > 1e-6) ok = false;

    // Monte Carlo: full guided chains against the propagated moments.
    const int kChains = 1000;
    double sum = 0.0;
    std::size_t count = 0;
    QuadraticObjective mc_obj(
        Image::constant(4, 4, 1, tau, Domain::LatentSigned));
    for (int i = 0; i < kChains; ++i) {
      GuidanceConfig ccfg = cfg;
      ccfg.seed = 52000 + static_cast<std::uint64_t>(i);
      const Image x = run_guided_ddpm(4, 4, 1, mc_obj, ccfg, pred, sched);
      for (std::size_t j = 0; j < x.size(); ++j) sum += x[j];
      count += x.size();
    }
    const double mean_mc = sum / static_cast<double>(count);
    const double se = std::sqrt(want.var / static_cast<double>(count));
    const double mean_err = std::abs(mean_mc - want.mean);
    // Strong guidance contracts the terminal variance toward zero, which
    // drives the standard error below double rounding; floor the band at
    // the accumulation noise so the statistical test stays meaningful.
    const double band = std::max(3.0 * se, 1e-9);
    if (mean_err > band) ok = false;
    detail += fmt("s=%.1f: det %.2g, mc err %.2g", s, worst, mean_err) +
              fmt(" (band %.2g); ", band);
  }
  const double secs = seconds_since(start);
  if (secs >= 60.0) ok = false;
  report("guided chain closed form + MC", ok,
         detail + fmt("%.1fs (budget 60s)", secs));
}

void check_gradients() {
  const auto start = std::chrono::steady_clock::now();
  const FeatureExtractor fx;
  double worst = 0.0;
  auto track = [&](double err) { worst = std::max(worst, err); };

  {
    const Image a = random_display(48, 48, 3, 201);
    const Image point = shifted_off_ties(a, 0.1, 202);
    track(gradcheck([&](const Image& x) { return mae(a, x); }, point, 1e-4));
  }
  {
    const Image a = random_display(64, 64, 3, 203);
    Image point = a;
    Rng rng(204);
    for (std::size_t i = 0; i < point.size(); ++i) {
      point[i] = std::clamp(point[i] + 0.2 * (2.0 * rng.uniform() - 1.0), 0.0,
                            1.0);
    }
    track(gradcheck([&](const Image& x) { return ms_ssim(a, x); }, point,
                    1e-3));
  }
  {
    const Image a = random_display(32, 32, 3, 205);
    const Image point = random_display(32, 32, 3, 206);
    // Small step: wider central differences straddle rectifier kinks, where
    // the (correct) subgradient and the symmetric difference disagree.
    track(gradcheck([&](const Image& x) { return perceptual(a, x, fx); },
                    point, 1e-5));
  }
  {
    const Image point = random_display(40, 40, 3, 207);
    track(gradcheck([](const Image& x) { return quality_proxy(x); }, point,
                    1e-4));
  }
  {
    const Image a = random_display(40, 40, 3, 208);
    const Image point = shifted_off_ties(a, 0.1, 209);
    const LossWeights w;
    track(gradcheck(
        [&](const Image& x) {
          TotalLoss tl = total_loss(a, x, w, fx);
          return ValueGrad{tl.report.total, std::move(tl.grad)};
        },
        point, 1e-4));
  }
  {
    const Image x_true = random_display(32, 32, 3, 210);
    Rng srng(211);
    const SyntheticScene scene =
        synthesize_underwater(x_true, {0.3, 0.5, 0.7}, 0.6, srng);
    const LossWeights w;
    const Image point = shifted_off_ties(x_true, 0.1, 212);
    track(gradcheck(
        [&](const Image& x) {
          UnderwaterMatch um =
              match_loss_underwater(scene.degraded, x, scene.params, w, fx);
          return ValueGrad{um.value, std::move(um.grad_x)};
        },
        point, 1e-4));

    // Transmission gradient by direct central differences.
    const UnderwaterMatch base =
        match_loss_underwater(scene.degraded, point, scene.params, w, fx);
    const double h = 1e-4;
    double worst_t = 0.0;
    const std::size_t total = scene.params.transmission.size();
    for (std::size_t k = 0; k < 64; ++k) {
      const std::size_t i = k * total / 64;
      DegradationParams up = scene.params;
      DegradationParams dn = scene.params;
      up.transmission[i] += h;
      dn.transmission[i] -= h;
      const double fd =
          (match_loss_underwater(scene.degraded, point, up, w, fx).value -
           match_loss_underwater(scene.degraded, point, dn, w, fx).value) /
          (2.0 * h);
      const double ana = base.grad_transmission[i];
      const double rel = std::abs(fd - ana) /
                         std::max({std::abs(fd), std::abs(ana), 1e-8});
      worst_t = std::max(worst_t, rel);
    }
    track(worst_t);
  }

  const double secs = seconds_since(start);
  report("analytic gradients vs finite diff", worst < 1e-3 && secs < 60.0,
         fmt("max rel err %.2g (tol 1e-3), %.1fs (budget 60s)", worst, secs));
}

void check_off_switch() {
  const int kT = 20;
  const NoiseSchedule sched = NoiseSchedule::linear(kT);
  const GaussianWorldPredictor pred(sched, 0.1, 0.9);
  const FeatureExtractor fx;
  const Image y = random_display(16, 16, 3, 301);
  const Image x_hat = random_display(16, 16, 3, 302);
  Rng srng(303);
  const SyntheticScene scene =
      synthesize_underwater(y, {0.3, 0.4, 0.6}, 0.7, srng);
  const std::uint64_t seed = 777;

  Image ddpm_ref;
  {
    Rng rng(seed);
    Image x = rng.normal_image(16, 16, 3, Domain::LatentSigned);
    for (int t = kT; t >= 1; --t) {
      ReverseStepDistribution dist = reverse_distribution(x, t, pred, sched);
      if (t == 1) dist.sigma2 = 0.0;
      x = ddpm_step(dist, rng);
    }
    ddpm_ref = x;
  }
  Image ddim_ref;
  {
    const std::vector<int> taus = ddim_timesteps(kT, 7);
    Rng rng(seed);
    Image x = rng.normal_image(16, 16, 3, Domain::LatentSigned);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const int t_prev = i + 1 < taus.size() ? taus[i + 1] : 0;
      x = ddim_step(x, pred.predict(x, taus[i]), taus[i], t_prev, sched);
    }
    ddim_ref = x;
  }

  double worst = 0.0;
  for (GuidanceVariant var :
       {GuidanceVariant::X0Natural, GuidanceVariant::XtNatural,
        GuidanceVariant::X0Underwater, GuidanceVariant::XtUnderwater}) {
    std::unique_ptr<GuidanceObjective> obj;
    if (is_underwater(var)) {
      obj = std::make_unique<UnderwaterObjective>(y, scene.params,
                                                  LossWeights{}, 0.0, fx);
    } else {
      obj = std::make_unique<NaturalObjective>(x_hat, LossWeights{}, fx);
    }
    GuidanceConfig cfg;
    cfg.variant = var;
    cfg.sampler = SamplerKind::Ddpm;
    cfg.steps = kT;
    cfg.scale = 0.0;
    cfg.seed = seed;
    worst = std::max(
        worst,
        max_diff(run_guided_ddpm(16, 16, 3, *obj, cfg, pred, sched), ddpm_ref));
    cfg.sampler = SamplerKind::Ddim;
    cfg.steps = 7;
    worst = std::max(
        worst,
        max_diff(run_guided_ddim(16, 16, 3, *obj, cfg, pred, sched), ddim_ref));
  }
  report("zero-scale guidance off switch", worst == 0.0,
         fmt("max |guided - unguided| = %.17g across 4 variants x 2 samplers",
             worst));
}

void check_ddim_determinism() {
  const fs::path in_dir = fresh_dir("det_in");
  save_image(random_display(16, 16, 3, 401), (in_dir / "one.png").string());
  save_image(random_display(16, 16, 3, 402), (in_dir / "two.png").string());

  RunConfig cfg;
  cfg.input = in_dir.string();
  cfg.guidance.variant = GuidanceVariant::X0Natural;
  cfg.guidance.sampler = SamplerKind::Ddim;
  cfg.guidance.steps = 5;
  cfg.guidance.scale = 0.01;
  cfg.guidance.seed = 99;
  cfg.schedule.steps = 20;
  cfg.resize = 0;
  cfg.workers = 2;

  const fs::path out_a = fresh_dir("det_a");
  const fs::path out_b = fresh_dir("det_b");
  cfg.output = out_a.string();
  const int rc1 = run(cfg);
  cfg.output = out_b.string();
  const int rc2 = run(cfg);

  bool ok = rc1 == 0 && rc2 == 0;
  for (const char* name : {"one.png", "two.png"}) {
    const std::string pa = read_file(out_a / name);
    const std::string pb = read_file(out_b / name);
    if (pa.empty() || pa != pb) ok = false;
  }
  report("ddim batch is byte-deterministic", ok,
         ok ? "identical PNGs across two runs" : "outputs differ or run failed");
}

void check_degradation_round_trip() {
  const FeatureExtractor fx;
  const LossWeights mae_only{0.0, 0.0, 0.0, 0.0};
  double worst_mae = 0.0;
  bool refine_ok = true;
  for (int k = 0; k < 20; ++k) {
    const double t0 = 0.3 + 0.6 * k / 19.0;
    const Image x = dotted_scene(48, 48, 500 + static_cast<std::uint64_t>(k));
    Rng rng(600 + static_cast<std::uint64_t>(k));
    const std::array<double, 3> a_color = {0.35 + 0.01 * k, 0.5,
                                           0.65 - 0.01 * k};
    const SyntheticScene scene = synthesize_underwater(x, a_color, t0, rng);

    const Image a_hat = estimate_background_light(scene.degraded);
    const Image t_hat = estimate_transmission(scene.degraded, a_hat);
    const DegradationParams est{a_hat, t_hat};
    worst_mae = std::max(worst_mae, mae(degrade(x, est), scene.degraded).value);

    const UnderwaterMatch before =
        match_loss_underwater(scene.degraded, x, est, mae_only, fx);
    const Image t2 =
        refine_transmission(t_hat, before.grad_transmission, 1e-3);
    const UnderwaterMatch after =
        match_loss_underwater(scene.degraded, x, {a_hat, t2}, mae_only, fx);
    if (after.value > before.value) refine_ok = false;
  }
  report("degradation estimate round trip", worst_mae < 0.1 && refine_ok,
         fmt("worst recon MAE %.4f (tol 0.1), ", worst_mae) +
             (refine_ok ? "refinement never increased the loss"
                        : "refinement increased the loss"));
}

void check_metric_oracles() {
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::uint64_t seed = 700 + static_cast<std::uint64_t>(k);
    const Image img = random_display(16 + (k % 3) * 4, 19, 3, seed);
    worst = std::max(worst, std::abs(uciqe(img) - oracles::uciqe_naive(img)));
    worst = std::max(worst, std::abs(uiqm(img) - oracles::uiqm_naive(img)));
    Image noisy = img;
    Rng rng(seed + 1000);
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      noisy[i] =
          std::clamp(noisy[i] + 0.1 * (2.0 * rng.uniform() - 1.0), 0.0, 1.0);
    }
    worst = std::max(worst,
                     std::abs(ssim(img, noisy) - oracles::ssim_naive(img, noisy)));
  }

  const Image a = random_display(16, 16, 3, 800);
  Image off = a;
  for (std::size_t i = 0; i < off.size(); ++i) off[i] += 1.0 / 255.0;
  const double p255 = psnr(a, off);
  Image tenth = a;
  for (std::size_t i = 0; i < tenth.size(); ++i) tenth[i] += 0.1;
  const double p20 = psnr(a, tenth);
  const bool psnr_ok =
      std::abs(p255 - 48.13) <= 0.01 && std::abs(p20 - 20.0) <= 0.01;

  report("metric oracles", worst <= 1e-5 && psnr_ok,
         fmt("max |lib - naive| %.2g (tol 1e-5); psnr %.3f/%.3f dB", worst,
             p255, p20));
}

void check_enhancement_gain() {
  const auto start = std::chrono::steady_clock::now();
  const int kT = 50;
  const NoiseSchedule sched = NoiseSchedule::linear(kT, 1e-4, 0.2);
  const GaussianWorldPredictor pred(sched, 0.0, 1.0);
  const DcpInversionLabeler labeler;

  double in_uiqm = 0.0, in_uciqe = 0.0, out_uiqm = 0.0, out_uciqe = 0.0;
  const int kScenes = 6;
  for (int k = 0; k < kScenes; ++k) {
    const Image x = smooth_scene(48, 48, 900 + static_cast<std::uint64_t>(k));
    Rng rng(950 + static_cast<std::uint64_t>(k));
    const SyntheticScene scene = synthesize_underwater(
        x, {0.25, 0.5, 0.75}, 0.35 + 0.07 * k, rng);
    const Image& y = scene.degraded;

    EnhanceRequest req;
    req.y = y;
    req.pseudo_label = labeler.enhance(y);

    GuidanceConfig cfg;
    cfg.variant = GuidanceVariant::X0Natural;
    cfg.sampler = SamplerKind::Ddpm;
    cfg.steps = kT;
    cfg.scale = 800.0;
    cfg.seed = 1234 + static_cast<std::uint64_t>(k);
    const EnhanceResult res = guided_ddpm_enhance(req, cfg, pred, sched);

    in_uiqm += uiqm(y);
    in_uciqe += uciqe(y);
    out_uiqm += uiqm(res.x0);
    out_uciqe += uciqe(res.x0);
  }
  in_uiqm /= kScenes;
  in_uciqe /= kScenes;
  out_uiqm /= kScenes;
  out_uciqe /= kScenes;

  const double secs = seconds_since(start);
  report("end-to-end enhancement gain",
         out_uiqm >= in_uiqm && out_uciqe >= in_uciqe && secs < 300.0,
         fmt("uiqm %.3f -> %.3f, ", in_uiqm, out_uiqm) +
             fmt("uciqe %.3f -> %.3f, ", in_uciqe, out_uciqe) +
             fmt("%.1fs (budget 300s)", secs));
}

void check_ablation_presets() {
  RunConfig base;
  base.input = "in";
  base.output = "out";
  base.guidance.seed = 99;
  base.schedule.steps = 1000;

  bool ok = true;
  auto expect = [&](bool cond) { ok = ok && cond; };

  const auto variants = ablation_preset("guidance-variants", base);
  expect(variants.size() == 4);
  const char* vnames[] = {"x0-natural", "xt-natural", "x0-underwater",
                          "xt-underwater"};
  for (std::size_t i = 0; i < variants.size() && i < 4; ++i) {
    expect(variants[i].first == vnames[i]);
    expect(variant_name(variants[i].second.guidance.variant) == vnames[i]);
  }

  const auto losses = ablation_preset("loss-terms", base);
  expect(losses.size() == 5);
  const char* lnames[] = {"mae", "mae+msssim", "mae+msssim+perceptual",
                          "mae+msssim+perceptual+qa",
                          "mae+msssim+perceptual+qa+qb"};
  const double l1s[] = {0.0, 1.0, 1.0, 1.0, 1.0};
  const double l2s[] = {0.0, 0.0, 0.005, 0.005, 0.005};
  const double l3s[] = {0.0, 0.0, 0.0, 0.001, 0.001};
  const double l4s[] = {0.0, 0.0, 0.0, 0.0, 1e-5};
  for (std::size_t i = 0; i < losses.size() && i < 5; ++i) {
    expect(losses[i].first == lnames[i]);
    expect(losses[i].second.guidance.weights.lambda1 == l1s[i]);
    expect(losses[i].second.guidance.weights.lambda2 == l2s[i]);
    expect(losses[i].second.guidance.weights.lambda3 == l3s[i]);
    expect(losses[i].second.guidance.weights.lambda4 == l4s[i]);
  }

  const auto samplers = ablation_preset("sampler-steps", base);
  expect(samplers.size() == 5);
  const char* snames[] = {"ddpm-50", "ddpm-250", "ddpm-1000", "ddim-25",
                          "ddim-50"};
  const int ssteps[] = {50, 250, 1000, 25, 50};
  for (std::size_t i = 0; i < samplers.size() && i < 5; ++i) {
    expect(samplers[i].first == snames[i]);
    expect(samplers[i].second.guidance.steps == ssteps[i]);
    expect(samplers[i].second.guidance.sampler ==
           (i < 3 ? SamplerKind::Ddpm : SamplerKind::Ddim));
    if (i < 3) expect(samplers[i].second.schedule.steps == ssteps[i]);
  }

  const auto shifts = ablation_preset("variance-shift", base);
  expect(shifts.size() == 2);
  expect(shifts.size() == 2 && shifts[0].first == "shift-sg" &&
         !shifts[0].second.guidance.shift_includes_variance);
  expect(shifts.size() == 2 && shifts[1].first == "shift-s-sigma-g" &&
         shifts[1].second.guidance.shift_includes_variance);

  // Config snapshots: every expanded config survives a JSON round trip
  // losslessly (serialize, parse, re-serialize, byte-compare).
  int snapshots = 0;
  for (const auto* preset : {&variants, &losses, &samplers, &shifts}) {
    for (const auto& entry : *preset) {
      const std::string json = run_config_to_json(entry.second);
      if (run_config_to_json(run_config_from_json(json)) != json) ok = false;
      ++snapshots;
    }
  }
  expect(snapshots == 16);

  report("ablation preset expansion", ok,
         ok ? "4+5+5+2 configs, all JSON snapshots stable"
            : "expansion or snapshot mismatch");
}

// A check that throws is a failure of that check, not of the gate binary.
void guarded(const char* name, void (*fn)()) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(name, false, std::string("unexpected exception: ") + e.what());
  }
}

}  // namespace

int main() {
  std::printf("acceptance gate\n===============\n");
  guarded("forward/inverse consistency", check_forward_inverse);
  guarded("unguided chain terminal moments", check_unguided_moments);
  guarded("guided chain closed form + MC", check_guided_closed_form);
  guarded("analytic gradients vs finite diff", check_gradients);
  guarded("zero-scale guidance off switch", check_off_switch);
  guarded("ddim batch is byte-deterministic", check_ddim_determinism);
  guarded("degradation estimate round trip", check_degradation_round_trip);
  guarded("metric oracles", check_metric_oracles);
  guarded("end-to-end enhancement gain", check_enhancement_gain);
  guarded("ablation preset expansion", check_ablation_presets);
  if (g_failures > 0) {
    std::printf("\n%d of 10 checks FAILED\n", g_failures);
    return 1;
  }
  std::printf("\nall 10 checks passed\n");
  return 0;
}
