#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uwdiff/runconfig.hpp"

namespace uwdiff {

// Expands one ablation preset into named run configurations sharing the
// base config's seed, paths, schedule, and predictor. Names double as
// output subdirectory names.
//
//   guidance-variants  four configs differing only in the variant
//   loss-terms         cumulative loss build-up, MAE first
//   sampler-steps      DDPM 50/250/1000 and DDIM 25/50
//   variance-shift     mean shift by s*g vs s*Sigma*g
std::vector<std::pair<std::string, RunConfig>> ablation_preset(
    const std::string& name, const RunConfig& base);

}  // namespace uwdiff
