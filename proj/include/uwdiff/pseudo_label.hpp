#pragma once

#include <memory>
#include <string>

#include "uwdiff/image.hpp"

namespace uwdiff {

// A pseudo-labeler turns the raw underwater observation into the enhanced
// draft the natural-domain guidance matches against. Deterministic and
// shape-preserving; outputs stay in [0, 1].
class PseudoLabeler {
 public:
  virtual ~PseudoLabeler() = default;
  virtual Image enhance(const Image& y) const = 0;
  virtual std::string name() const = 0;
};

// Passes the observation through untouched.
class IdentityLabeler final : public PseudoLabeler {
 public:
  Image enhance(const Image& y) const override;
  std::string name() const override { return "identity"; }
};

// Gray-world channel gains (clamped to [0.5, 3]) followed by a per-channel
// percentile stretch mapping [p1, p99] onto [0, 1].
class GrayWorldContrastLabeler final : public PseudoLabeler {
 public:
  Image enhance(const Image& y) const override;
  std::string name() const override { return "grayworld-contrast"; }
};

// Inverts the scattering model with estimated background light and
// transmission: x_hat = clamp((y - (1 - T) A) / max(T, 0.1), 0, 1).
class DcpInversionLabeler final : public PseudoLabeler {
 public:
  Image enhance(const Image& y) const override;
  std::string name() const override { return "dcp-inversion"; }
};

// Factory over the names above; throws std::invalid_argument on unknown.
std::unique_ptr<PseudoLabeler> make_labeler(const std::string& name);

}  // namespace uwdiff
