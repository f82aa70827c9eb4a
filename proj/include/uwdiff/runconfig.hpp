#pragma once

#include <string>

#include "uwdiff/guidance.hpp"

namespace uwdiff {

// Forward-schedule selection for a run.
struct ScheduleConfig {
  int steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
};

// Noise-predictor selection: the analytic Gaussian-world predictor or a
// precomputed per-timestep grid file. Spelled "gaussian:MEAN,VARIANCE" or
// "file:PATH" on the command line and in configs.
struct PredictorConfig {
  std::string kind = "gaussian";
  double mean = 0.0;      // gaussian
  double variance = 1.0;  // gaussian
  std::string path;       // file
};

PredictorConfig parse_predictor_spec(const std::string& spec);
std::string predictor_spec(const PredictorConfig& cfg);

// One batch run: where images come from, where results go, and every knob
// of the sampler. Serializes to a single JSON document; the JSON form and
// this struct round-trip losslessly.
struct RunConfig {
  std::string input;             // file or directory
  std::string output;            // directory, created if missing
  std::string reference;         // optional directory (enables PSNR/SSIM)
  std::string pseudo_label_dir;  // optional directory of precomputed labels
  GuidanceConfig guidance;
  ScheduleConfig schedule;
  PredictorConfig predictor;
  std::string labeler = "dcp-inversion";
  int resize = 256;  // square resize target; 0 disables
  int workers = 0;   // 0 = hardware concurrency
  bool export_degradation = false;
};

RunConfig run_config_from_json(const std::string& text);
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace uwdiff
