#include "uwdiff/guidance.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace uwdiff {

namespace {

constexpr double kDivergenceLimit = 1e3;  // latent units

// Latent -> display without the clamp of from_latent: guidance needs the
// map to stay affine so the chain factor is exactly 1/2 everywhere.
Image to_display_affine(const Image& x) {
  Image out(x.height(), x.width(), x.channels(), Domain::Display01);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.5 * (x[i] + 1.0);
  return out;
}

void check_degradation_shapes(const Image& x, const DegradationParams& params,
                              const char* what) {
  require_same_shape(x, params.background_light, what);
  if (params.transmission.height() != x.height() ||
      params.transmission.width() != x.width() ||
      params.transmission.channels() != 1) {
    throw std::invalid_argument(std::string(what) +
                                ": transmission map must be HxWx1");
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Names.

GuidanceVariant parse_variant(const std::string& name) {
  if (name == "x0-natural") return GuidanceVariant::X0Natural;
  if (name == "xt-natural") return GuidanceVariant::XtNatural;
  if (name == "x0-underwater") return GuidanceVariant::X0Underwater;
  if (name == "xt-underwater") return GuidanceVariant::XtUnderwater;
  throw std::invalid_argument("unknown guidance variant: " + name);
}

std::string variant_name(GuidanceVariant v) {
  switch (v) {
    case GuidanceVariant::X0Natural: return "x0-natural";
    case GuidanceVariant::XtNatural: return "xt-natural";
    case GuidanceVariant::X0Underwater: return "x0-underwater";
    case GuidanceVariant::XtUnderwater: return "xt-underwater";
  }
  throw std::logic_error("variant_name: bad enum");
}

SamplerKind parse_sampler(const std::string& name) {
  if (name == "ddpm") return SamplerKind::Ddpm;
  if (name == "ddim") return SamplerKind::Ddim;
  throw std::invalid_argument("unknown sampler: " + name);
}

std::string sampler_name(SamplerKind s) {
  return s == SamplerKind::Ddpm ? "ddpm" : "ddim";
}

bool is_underwater(GuidanceVariant v) {
  return v == GuidanceVariant::X0Underwater ||
         v == GuidanceVariant::XtUnderwater;
}

bool is_x0(GuidanceVariant v) {
  return v == GuidanceVariant::X0Natural || v == GuidanceVariant::X0Underwater;
}

void validate(const GuidanceConfig& cfg, const NoiseSchedule& sched) {
  if (!(cfg.scale >= 0.0)) {
    throw std::invalid_argument("guidance: scale must be non-negative");
  }
  if (!(cfg.transmission_lr >= 0.0)) {
    throw std::invalid_argument(
        "guidance: transmission learning rate must be non-negative");
  }
  if (cfg.transmission_lr != 0.0 && !is_underwater(cfg.variant)) {
    throw std::invalid_argument(
        "guidance: transmission learning rate applies only to underwater "
        "variants");
  }
  for (double l : {cfg.weights.lambda1, cfg.weights.lambda2,
                   cfg.weights.lambda3, cfg.weights.lambda4}) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument(
          "guidance: loss weights must be finite and non-negative");
    }
  }
  if (cfg.steps < 1 || cfg.steps > sched.steps()) {
    throw std::invalid_argument("guidance: steps outside [1, schedule T]");
  }
  if (cfg.sampler == SamplerKind::Ddpm && cfg.steps != sched.steps()) {
    throw std::invalid_argument(
        "guidance: DDPM walks the full schedule; set steps == schedule T or "
        "shorten the schedule itself");
  }
  if (cfg.sampler == SamplerKind::Ddim && cfg.grad_at_mean) {
    throw std::invalid_argument(
        "guidance: grad-at-mean is a DDPM posterior-mean switch");
  }
  if (cfg.sampler == SamplerKind::Ddim && cfg.shift_includes_variance) {
    throw std::invalid_argument(
        "guidance: the DDIM update has no variance to fold into the shift");
  }
  if (cfg.snapshot_stride < 0) {
    throw std::invalid_argument("guidance: snapshot stride must be >= 0");
  }
}

// ---------------------------------------------------------------------------
// Matching functions.

ValueGrad match_loss_natural(const Image& x_hat, const Image& x,
                             const LossWeights& w,
                             const FeatureExtractor& fx) {
  const bool latent = x.domain() == Domain::LatentSigned;
  const Image x_disp = latent ? to_display_affine(x) : x;
  require_same_shape(x_hat, x_disp, "match_loss_natural");

  TotalLoss tl = total_loss(x_hat, x_disp, w, fx);
  ValueGrad out;
  out.value = tl.report.total;
  out.grad = std::move(tl.grad);
  if (latent) {
    for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] *= 0.5;
  }
  out.grad.set_domain(Domain::LatentSigned);
  return out;
}

UnderwaterMatch match_loss_underwater(const Image& y, const Image& x,
                                      const DegradationParams& params,
                                      const LossWeights& w,
                                      const FeatureExtractor& fx) {
  const bool latent = x.domain() == Domain::LatentSigned;
  const Image x_disp = latent ? to_display_affine(x) : x;
  require_same_shape(y, x_disp, "match_loss_underwater");
  require_channels(y, 3, "match_loss_underwater");
  check_degradation_shapes(y, params, "match_loss_underwater");

  // Only the similarity terms compare y against its re-degraded estimate;
  // quality scores of a deliberately degraded image would be noise.
  LossWeights sim = w;
  sim.lambda3 = 0.0;
  sim.lambda4 = 0.0;

  const int h = y.height(), wd = y.width();
  Image y_hat(h, wd, 3, Domain::Display01);  // unclamped composition
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < wd; ++xx) {
      const double t = params.transmission.at(yy, xx, 0);
      for (int c = 0; c < 3; ++c) {
        y_hat.at(yy, xx, c) =
            x_disp.at(yy, xx, c) * t +
            (1.0 - t) * params.background_light.at(yy, xx, c);
      }
    }
  }

  TotalLoss tl = total_loss(y, y_hat, sim, fx);

  UnderwaterMatch out;
  out.value = tl.report.total;
  out.grad_x = Image(h, wd, 3, Domain::LatentSigned);
  out.grad_transmission = Image(h, wd, 1, Domain::LatentSigned);
  const double chain = latent ? 0.5 : 1.0;
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < wd; ++xx) {
      const double t = params.transmission.at(yy, xx, 0);
      double gt = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double gy = tl.grad.at(yy, xx, c);
        out.grad_x.at(yy, xx, c) = gy * t * chain;
        gt += gy * (x_disp.at(yy, xx, c) -
                    params.background_light.at(yy, xx, c));
      }
      out.grad_transmission.at(yy, xx, 0) = gt;
    }
  }
  return out;
}

Image mean_shift(const Image& mu, const Image& g, double s) {
  require_same_shape(mu, g, "mean_shift");
  return add_scaled(mu, g, s);
}

// ---------------------------------------------------------------------------
// Objectives.

NaturalObjective::NaturalObjective(Image x_hat, const LossWeights& w,
                                   const FeatureExtractor& fx)
    : x_hat_(std::move(x_hat)), weights_(w), fx_(fx) {}

ValueGrad NaturalObjective::eval(const Image& x) {
  return match_loss_natural(x_hat_, x, weights_, fx_);
}

UnderwaterObjective::UnderwaterObjective(Image y, DegradationParams params,
                                         const LossWeights& w,
                                         double transmission_lr,
                                         const FeatureExtractor& fx)
    : y_(std::move(y)),
      params_(std::move(params)),
      weights_(w),
      lr_(transmission_lr),
      fx_(fx) {}

ValueGrad UnderwaterObjective::eval(const Image& x) {
  UnderwaterMatch m = match_loss_underwater(y_, x, params_, weights_, fx_);
  pending_grad_t_ = std::move(m.grad_transmission);
  ValueGrad out;
  out.value = m.value;
  out.grad = std::move(m.grad_x);
  return out;
}

bool UnderwaterObjective::refine() {
  if (pending_grad_t_.empty() || lr_ == 0.0) return false;
  bool clamped = false;
  params_.transmission =
      refine_transmission(params_.transmission, pending_grad_t_, lr_, &clamped);
  return clamped;
}

ValueGrad QuadraticObjective::eval(const Image& x) {
  require_same_shape(x, target_, "QuadraticObjective");
  ValueGrad out;
  out.grad = Image(x.height(), x.width(), x.channels(), Domain::LatentSigned);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - target_[i];
    out.grad[i] = d;
    acc += d * d;
  }
  out.value = 0.5 * acc;
  return out;
}

// ---------------------------------------------------------------------------
// Sampling loops.

ReverseStepDistribution guided_step_distribution(
    const Image& x_t, int t, GuidanceObjective& objective,
    const GuidanceConfig& cfg, const NoisePredictor& predictor,
    const NoiseSchedule& sched, StepRecord* record, bool want_snapshot) {
  const Image eps = predictor.predict(x_t, t);
  ReverseStepDistribution dist = reverse_distribution_from_eps(
      x_t, eps, t, predictor.variance_policy(), sched);

  // Evaluation point: the sampled x_t by default, the step mean under the
  // grad-at-mean ablation (which then needs its own noise estimate for the
  // clean-image readout).
  const Image& base = cfg.grad_at_mean ? dist.mu : x_t;
  const Image x0 =
      cfg.grad_at_mean
          ? predict_x0(base, predictor.predict(base, t), t, sched)
          : predict_x0(base, eps, t, sched);

  ValueGrad vg = objective.eval(is_x0(cfg.variant) ? x0 : base);
  const bool clamped = objective.refine();

  // g = -grad; shift the mean by s*g (optionally s*Sigma*g for the ablation).
  const double shift =
      cfg.shift_includes_variance ? cfg.scale * dist.sigma2 : cfg.scale;
  if (shift != 0.0) {
    dist.mu = add_scaled(dist.mu, vg.grad, -shift);
  }

  if (record != nullptr) {
    record->t = t;
    record->loss = vg.value;
    record->grad_norm = l2_norm(vg.grad);
    record->transmission_clamped = clamped;
    if (want_snapshot) record->snapshot = from_latent(x0);
  }
  return dist;
}

namespace {

void divergence_guard(const Image& x, int t, double grad_norm) {
  const double peak = max_abs(x);
  if (peak > kDivergenceLimit) {
    throw std::runtime_error(
        "guided sampling diverged at step t=" + std::to_string(t) +
        ": |sample| reached " + format_double(peak) +
        " (gradient norm " + format_double(grad_norm) +
        "); lower the gradient scale");
  }
}

}  // namespace

Image run_guided_ddpm(int height, int width, int channels,
                      GuidanceObjective& objective, const GuidanceConfig& cfg,
                      const NoisePredictor& predictor,
                      const NoiseSchedule& sched, SampleTrace* trace) {
  if (cfg.sampler != SamplerKind::Ddpm) {
    throw std::invalid_argument("run_guided_ddpm: config selects DDIM");
  }
  validate(cfg, sched);
  Rng rng(cfg.seed);
  Image x = rng.normal_image(height, width, channels, Domain::LatentSigned);
  int index = 0;
  for (int t = sched.steps(); t >= 1; --t, ++index) {
    const bool snap =
        cfg.snapshot_stride > 0 && index % cfg.snapshot_stride == 0;
    StepRecord rec;
    ReverseStepDistribution dist = guided_step_distribution(
        x, t, objective, cfg, predictor, sched, &rec, snap);
    if (t == 1) dist.sigma2 = 0.0;  // last step is noiseless
    x = ddpm_step(dist, rng);
    divergence_guard(x, t, rec.grad_norm);
    if (trace != nullptr) trace->steps.push_back(std::move(rec));
  }
  return x;
}

Image run_guided_ddim(int height, int width, int channels,
                      GuidanceObjective& objective, const GuidanceConfig& cfg,
                      const NoisePredictor& predictor,
                      const NoiseSchedule& sched, SampleTrace* trace) {
  if (cfg.sampler != SamplerKind::Ddim) {
    throw std::invalid_argument("run_guided_ddim: config selects DDPM");
  }
  validate(cfg, sched);
  const std::vector<int> taus = ddim_timesteps(sched.steps(), cfg.steps);
  Rng rng(cfg.seed);
  Image x = rng.normal_image(height, width, channels, Domain::LatentSigned);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const int t = taus[i];
    const int t_prev = i + 1 < taus.size() ? taus[i + 1] : 0;
    const Image eps = predictor.predict(x, t);
    const Image x0 = predict_x0(x, eps, t, sched);

    StepRecord rec;
    rec.t = t;
    ValueGrad vg = objective.eval(is_x0(cfg.variant) ? x0 : x);
    rec.loss = vg.value;
    rec.grad_norm = l2_norm(vg.grad);
    rec.transmission_clamped = objective.refine();
    if (cfg.snapshot_stride > 0 &&
        i % static_cast<std::size_t>(cfg.snapshot_stride) == 0) {
      rec.snapshot = from_latent(x0);
    }

    // eps_hat = eps - sqrt(1 - alpha_bar_t) * s * g with g = -grad.
    const double coef = std::sqrt(1.0 - sched.alpha_bar(t)) * cfg.scale;
    const Image eps_hat =
        coef != 0.0 ? add_scaled(eps, vg.grad, coef) : eps;
    x = ddim_step(x, eps_hat, t, t_prev, sched);
    divergence_guard(x, t, rec.grad_norm);
    if (trace != nullptr) trace->steps.push_back(std::move(rec));
  }
  return x;
}

// ---------------------------------------------------------------------------
// End-to-end enhancement.

namespace {

std::unique_ptr<GuidanceObjective> build_objective(const EnhanceRequest& req,
                                                   const GuidanceConfig& cfg,
                                                   const FeatureExtractor& fx) {
  if (is_underwater(cfg.variant)) {
    if (!req.degradation.has_value()) {
      throw std::invalid_argument(
          "enhance: underwater variants need degradation parameters");
    }
    if (req.pseudo_label.has_value()) {
      throw std::invalid_argument(
          "enhance: underwater variants take no pseudo-label");
    }
    check_degradation_shapes(req.y, *req.degradation, "enhance");
    return std::make_unique<UnderwaterObjective>(
        req.y, *req.degradation, cfg.weights, cfg.transmission_lr, fx);
  }
  if (!req.pseudo_label.has_value()) {
    throw std::invalid_argument(
        "enhance: natural-domain variants need a pseudo-label");
  }
  if (req.degradation.has_value()) {
    throw std::invalid_argument(
        "enhance: natural-domain variants take no degradation parameters");
  }
  require_same_shape(req.y, *req.pseudo_label, "enhance");
  return std::make_unique<NaturalObjective>(*req.pseudo_label, cfg.weights,
                                            fx);
}

EnhanceResult run_enhance(const EnhanceRequest& req, const GuidanceConfig& cfg,
                          const NoisePredictor& predictor,
                          const NoiseSchedule& sched) {
  validate(cfg, sched);
  const FeatureExtractor fx(kDefaultFeatureSeed);
  std::unique_ptr<GuidanceObjective> objective =
      build_objective(req, cfg, fx);
  EnhanceResult result;
  Image x0 =
      cfg.sampler == SamplerKind::Ddpm
          ? run_guided_ddpm(req.y.height(), req.y.width(), req.y.channels(),
                            *objective, cfg, predictor, sched, &result.trace)
          : run_guided_ddim(req.y.height(), req.y.width(), req.y.channels(),
                            *objective, cfg, predictor, sched, &result.trace);
  result.x0 = from_latent(x0);
  return result;
}

}  // namespace

EnhanceResult guided_ddpm_enhance(const EnhanceRequest& req,
                                  const GuidanceConfig& cfg,
                                  const NoisePredictor& predictor,
                                  const NoiseSchedule& sched) {
  if (cfg.sampler != SamplerKind::Ddpm) {
    throw std::invalid_argument("guided_ddpm_enhance: config selects DDIM");
  }
  return run_enhance(req, cfg, predictor, sched);
}

EnhanceResult guided_ddim_enhance(const EnhanceRequest& req,
                                  const GuidanceConfig& cfg,
                                  const NoisePredictor& predictor,
                                  const NoiseSchedule& sched) {
  if (cfg.sampler != SamplerKind::Ddim) {
    throw std::invalid_argument("guided_ddim_enhance: config selects DDPM");
  }
  return run_enhance(req, cfg, predictor, sched);
}

std::string SampleTrace::to_csv() const {
  std::string out = "step,loss,grad_norm,t_clamped\n";
  for (const StepRecord& r : steps) {
    out += std::to_string(r.t);
    out += ',' + format_double(r.loss);
    out += ',' + format_double(r.grad_norm);
    out += ',';
    out += r.transmission_clamped ? '1' : '0';
    out += '\n';
  }
  return out;
}

}  // namespace uwdiff
