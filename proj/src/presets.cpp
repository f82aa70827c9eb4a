#include "uwdiff/presets.hpp"

#include <stdexcept>

namespace uwdiff {

namespace {

constexpr double kPresetScale = 12000.0;  // reference-paired evaluation scale

RunConfig with_defaults(const RunConfig& base) {
  RunConfig cfg = base;
  cfg.guidance.scale = kPresetScale;
  return cfg;
}

std::vector<std::pair<std::string, RunConfig>> guidance_variants(
    const RunConfig& base) {
  // Fair comparison: quality terms off and no transmission refinement, so
  // the four runs differ in nothing but the variant.
  RunConfig cfg = with_defaults(base);
  cfg.guidance.weights.lambda3 = 0.0;
  cfg.guidance.weights.lambda4 = 0.0;
  cfg.guidance.transmission_lr = 0.0;
  std::vector<std::pair<std::string, RunConfig>> out;
  for (GuidanceVariant v :
       {GuidanceVariant::X0Natural, GuidanceVariant::XtNatural,
        GuidanceVariant::X0Underwater, GuidanceVariant::XtUnderwater}) {
    cfg.guidance.variant = v;
    out.emplace_back(variant_name(v), cfg);
  }
  return out;
}

std::vector<std::pair<std::string, RunConfig>> loss_terms(
    const RunConfig& base) {
  RunConfig cfg = with_defaults(base);
  cfg.guidance.variant = GuidanceVariant::X0Natural;
  std::vector<std::pair<std::string, RunConfig>> out;
  const struct {
    const char* name;
    LossWeights w;
  } rows[] = {
      {"mae", {0.0, 0.0, 0.0, 0.0}},
      {"mae+msssim", {1.0, 0.0, 0.0, 0.0}},
      {"mae+msssim+perceptual", {1.0, 0.005, 0.0, 0.0}},
      {"mae+msssim+perceptual+qa", {1.0, 0.005, 0.001, 0.0}},
      {"mae+msssim+perceptual+qa+qb", {1.0, 0.005, 0.001, 1e-5}},
  };
  for (const auto& row : rows) {
    cfg.guidance.weights = row.w;
    out.emplace_back(row.name, cfg);
  }
  return out;
}

std::vector<std::pair<std::string, RunConfig>> sampler_steps(
    const RunConfig& base) {
  std::vector<std::pair<std::string, RunConfig>> out;
  // DDPM rows walk complete schedules of the stated length.
  for (int steps : {50, 250, 1000}) {
    RunConfig cfg = with_defaults(base);
    cfg.guidance.sampler = SamplerKind::Ddpm;
    cfg.guidance.steps = steps;
    cfg.schedule.steps = steps;
    out.emplace_back("ddpm-" + std::to_string(steps), cfg);
  }
  // DDIM rows subsample the base schedule.
  for (int steps : {25, 50}) {
    RunConfig cfg = with_defaults(base);
    cfg.guidance.sampler = SamplerKind::Ddim;
    cfg.guidance.steps = steps;
    out.emplace_back("ddim-" + std::to_string(steps), cfg);
  }
  return out;
}

std::vector<std::pair<std::string, RunConfig>> variance_shift(
    const RunConfig& base) {
  RunConfig cfg = with_defaults(base);
  cfg.guidance.sampler = SamplerKind::Ddpm;
  std::vector<std::pair<std::string, RunConfig>> out;
  cfg.guidance.shift_includes_variance = false;
  out.emplace_back("shift-sg", cfg);
  cfg.guidance.shift_includes_variance = true;
  out.emplace_back("shift-s-sigma-g", cfg);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, RunConfig>> ablation_preset(
    const std::string& name, const RunConfig& base) {
  if (name == "guidance-variants") return guidance_variants(base);
  if (name == "loss-terms") return loss_terms(base);
  if (name == "sampler-steps") return sampler_steps(base);
  if (name == "variance-shift") return variance_shift(base);
  throw std::invalid_argument("unknown ablation preset: " + name);
}

}  // namespace uwdiff
