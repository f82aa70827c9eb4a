#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uwdiff/degradation.hpp"
#include "uwdiff/diffusion.hpp"
#include "uwdiff/image.hpp"
#include "uwdiff/losses.hpp"
#include "uwdiff/predictor.hpp"
#include "uwdiff/rng.hpp"
#include "uwdiff/schedule.hpp"

namespace uwdiff {

// Where the matching gradient is taken (clean estimate x0_tilde vs the raw
// latent x_t) and which domain it matches in (against a pseudo-label in the
// natural domain vs against the observation through the scattering model).
enum class GuidanceVariant { X0Natural, XtNatural, X0Underwater, XtUnderwater };

enum class SamplerKind { Ddpm, Ddim };

GuidanceVariant parse_variant(const std::string& name);
std::string variant_name(GuidanceVariant v);
SamplerKind parse_sampler(const std::string& name);
std::string sampler_name(SamplerKind s);

bool is_underwater(GuidanceVariant v);
bool is_x0(GuidanceVariant v);

struct GuidanceConfig {
  GuidanceVariant variant = GuidanceVariant::X0Natural;
  double scale = 1.0;            // gradient scale s
  LossWeights weights;           // lambda1..lambda4
  double transmission_lr = 0.0;  // l; underwater variants only
  SamplerKind sampler = SamplerKind::Ddpm;
  int steps = 1000;
  std::uint64_t seed = 0;
  int snapshot_stride = 0;  // 0 = no snapshots
  // Ablation switches: evaluate the gradient at the step mean instead of
  // the sampled x_t, and shift by s*Sigma*g instead of s*g.
  bool grad_at_mean = false;
  bool shift_includes_variance = false;
};

// Throws std::invalid_argument on violated invariants (negative scale or
// learning rate, l nonzero for natural variants, steps out of range; DDPM
// must walk the full schedule).
void validate(const GuidanceConfig& cfg, const NoiseSchedule& sched);

struct StepRecord {
  int t = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  bool transmission_clamped = false;
  std::optional<Image> snapshot;  // x0_tilde mapped to Display01
};

struct SampleTrace {
  std::vector<StepRecord> steps;
  // step,loss,grad_norm,t_clamped rows in execution order.
  std::string to_csv() const;
};

struct EnhanceRequest {
  Image y;                            // Display01 observation
  std::optional<Image> pseudo_label;  // natural-domain variants only
  std::optional<DegradationParams> degradation;  // underwater variants only
};

struct EnhanceResult {
  Image x0;  // Display01
  SampleTrace trace;
};

// ---------------------------------------------------------------------------
// Matching functions.

// Guidance loss of the natural domain: the five-term loss evaluated at
// (x_hat, x). x may arrive as LatentSigned, in which case it is mapped by
// the affine (x+1)/2 without clamping and the returned gradient includes
// the 1/2 chain factor.
ValueGrad match_loss_natural(const Image& x_hat, const Image& x,
                             const LossWeights& w, const FeatureExtractor& fx);

struct UnderwaterMatch {
  double value = 0.0;
  Image grad_x;             // same domain convention as the input x
  Image grad_transmission;  // HxWx1
};

// Similarity between the observation y and the re-degraded estimate
// y_hat = x * T + (1 - T) * A (unclamped composition, so the gradients stay
// exact). Quality terms are never applied to a deliberately degraded image:
// only the similarity weights (lambda1, lambda2) participate.
UnderwaterMatch match_loss_underwater(const Image& y, const Image& x,
                                      const DegradationParams& params,
                                      const LossWeights& w,
                                      const FeatureExtractor& fx);

// mu + s * g. The variance deliberately does not multiply the shift.
Image mean_shift(const Image& mu, const Image& g, double s);

// ---------------------------------------------------------------------------
// Objective seam: what the sampling loops differentiate at each step. The
// loop calls eval() at the variant's evaluation point, then refine() once
// per step (transmission descent for the underwater objectives, a no-op
// otherwise). refine() returns whether the update hit the [0,1] clamp.

class GuidanceObjective {
 public:
  virtual ~GuidanceObjective() = default;
  virtual ValueGrad eval(const Image& x) = 0;
  virtual bool refine() { return false; }
};

class NaturalObjective final : public GuidanceObjective {
 public:
  NaturalObjective(Image x_hat, const LossWeights& w,
                   const FeatureExtractor& fx);
  ValueGrad eval(const Image& x) override;

 private:
  Image x_hat_;
  LossWeights weights_;
  const FeatureExtractor& fx_;
};

class UnderwaterObjective final : public GuidanceObjective {
 public:
  UnderwaterObjective(Image y, DegradationParams params, const LossWeights& w,
                      double transmission_lr, const FeatureExtractor& fx);
  ValueGrad eval(const Image& x) override;
  bool refine() override;

  const DegradationParams& params() const { return params_; }

 private:
  Image y_;
  DegradationParams params_;  // chain-private copy; T refined cumulatively
  LossWeights weights_;
  double lr_;
  const FeatureExtractor& fx_;
  Image pending_grad_t_;
};

// 0.5 * ||x - target||^2 in latent units, gradient x - target. Keeps the
// whole guided chain affine-Gaussian for the closed-form test oracles.
class QuadraticObjective final : public GuidanceObjective {
 public:
  explicit QuadraticObjective(Image target) : target_(std::move(target)) {}
  ValueGrad eval(const Image& x) override;

 private:
  Image target_;
};

// ---------------------------------------------------------------------------
// Sampling loops.

// One guided reverse step: the base DDPM distribution with the mean shifted
// by s*g (g from the objective at the variant's evaluation point). The
// final step's variance is zeroed by the caller loop, not here. `record`
// (optional) receives loss/grad bookkeeping; `want_snapshot` additionally
// stores from_latent(x0_tilde).
ReverseStepDistribution guided_step_distribution(
    const Image& x_t, int t, GuidanceObjective& objective,
    const GuidanceConfig& cfg, const NoisePredictor& predictor,
    const NoiseSchedule& sched, StepRecord* record = nullptr,
    bool want_snapshot = false);

// Full guided chains over a fresh x_T ~ N(0, I); return the terminal latent.
Image run_guided_ddpm(int height, int width, int channels,
                      GuidanceObjective& objective, const GuidanceConfig& cfg,
                      const NoisePredictor& predictor,
                      const NoiseSchedule& sched, SampleTrace* trace = nullptr);
Image run_guided_ddim(int height, int width, int channels,
                      GuidanceObjective& objective, const GuidanceConfig& cfg,
                      const NoisePredictor& predictor,
                      const NoiseSchedule& sched, SampleTrace* trace = nullptr);

// End-to-end enhancement: builds the variant's objective from the request
// and runs the matching sampler. The request must carry exactly the fields
// the variant demands (pseudo-label for natural, degradation parameters for
// underwater).
EnhanceResult guided_ddpm_enhance(const EnhanceRequest& req,
                                  const GuidanceConfig& cfg,
                                  const NoisePredictor& predictor,
                                  const NoiseSchedule& sched);
EnhanceResult guided_ddim_enhance(const EnhanceRequest& req,
                                  const GuidanceConfig& cfg,
                                  const NoisePredictor& predictor,
                                  const NoiseSchedule& sched);

}  // namespace uwdiff
