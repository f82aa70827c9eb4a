#include "uwdiff/runconfig.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace uwdiff {

using nlohmann::json;

PredictorConfig parse_predictor_spec(const std::string& spec) {
  PredictorConfig cfg;
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  if (kind == "gaussian") {
    cfg.kind = "gaussian";
    if (colon != std::string::npos) {
      const std::string args = spec.substr(colon + 1);
      if (std::sscanf(args.c_str(), "%lf,%lf", &cfg.mean, &cfg.variance) != 2) {
        throw std::invalid_argument(
            "predictor spec: expected gaussian:MEAN,VARIANCE, got '" + spec +
            "'");
      }
    }
    if (!(cfg.variance > 0.0)) {
      throw std::invalid_argument("predictor spec: variance must be > 0");
    }
    return cfg;
  }
  if (kind == "file") {
    if (colon == std::string::npos || colon + 1 == spec.size()) {
      throw std::invalid_argument("predictor spec: file needs a path");
    }
    cfg.kind = "file";
    cfg.path = spec.substr(colon + 1);
    return cfg;
  }
  throw std::invalid_argument("predictor spec: unknown kind '" + kind + "'");
}

std::string predictor_spec(const PredictorConfig& cfg) {
  if (cfg.kind == "gaussian") {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "gaussian:%.17g,%.17g", cfg.mean,
                  cfg.variance);
    return buf;
  }
  return "file:" + cfg.path;
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (known.find(it.key()) == known.end()) {
      throw std::invalid_argument("config: unknown key '" + it.key() +
                                  "' in " + where);
    }
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
  json root = json::parse(text);
  if (!root.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  reject_unknown_keys(root,
                      {"input", "output", "reference", "pseudo_label_dir",
                       "guidance", "schedule", "predictor", "labeler",
                       "resize", "workers", "export_degradation"},
                      "the top level");

  RunConfig cfg;
  read_into(root, "input", cfg.input);
  read_into(root, "output", cfg.output);
  read_into(root, "reference", cfg.reference);
  read_into(root, "pseudo_label_dir", cfg.pseudo_label_dir);
  read_into(root, "labeler", cfg.labeler);
  read_into(root, "resize", cfg.resize);
  read_into(root, "workers", cfg.workers);
  read_into(root, "export_degradation", cfg.export_degradation);

  if (root.contains("guidance")) {
    const json& g = root.at("guidance");
    reject_unknown_keys(g,
                        {"variant", "scale", "lambda1", "lambda2", "lambda3",
                         "lambda4", "transmission_lr", "sampler", "steps",
                         "seed", "snapshot_stride", "grad_at_mean",
                         "shift_includes_variance"},
                        "guidance");
    if (g.contains("variant")) {
      cfg.guidance.variant = parse_variant(g.at("variant").get<std::string>());
    }
    read_into(g, "scale", cfg.guidance.scale);
    read_into(g, "lambda1", cfg.guidance.weights.lambda1);
    read_into(g, "lambda2", cfg.guidance.weights.lambda2);
    read_into(g, "lambda3", cfg.guidance.weights.lambda3);
    read_into(g, "lambda4", cfg.guidance.weights.lambda4);
    read_into(g, "transmission_lr", cfg.guidance.transmission_lr);
    if (g.contains("sampler")) {
      cfg.guidance.sampler = parse_sampler(g.at("sampler").get<std::string>());
    }
    read_into(g, "steps", cfg.guidance.steps);
    read_into(g, "seed", cfg.guidance.seed);
    read_into(g, "snapshot_stride", cfg.guidance.snapshot_stride);
    read_into(g, "grad_at_mean", cfg.guidance.grad_at_mean);
    read_into(g, "shift_includes_variance",
              cfg.guidance.shift_includes_variance);
  }

  if (root.contains("schedule")) {
    const json& s = root.at("schedule");
    reject_unknown_keys(s, {"steps", "beta_start", "beta_end"}, "schedule");
    read_into(s, "steps", cfg.schedule.steps);
    read_into(s, "beta_start", cfg.schedule.beta_start);
    read_into(s, "beta_end", cfg.schedule.beta_end);
  }

  if (root.contains("predictor")) {
    cfg.predictor = parse_predictor_spec(root.at("predictor").get<std::string>());
  }
  return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
  json g = {
      {"variant", variant_name(cfg.guidance.variant)},
      {"scale", cfg.guidance.scale},
      {"lambda1", cfg.guidance.weights.lambda1},
      {"lambda2", cfg.guidance.weights.lambda2},
      {"lambda3", cfg.guidance.weights.lambda3},
      {"lambda4", cfg.guidance.weights.lambda4},
      {"transmission_lr", cfg.guidance.transmission_lr},
      {"sampler", sampler_name(cfg.guidance.sampler)},
      {"steps", cfg.guidance.steps},
      {"seed", cfg.guidance.seed},
      {"snapshot_stride", cfg.guidance.snapshot_stride},
      {"grad_at_mean", cfg.guidance.grad_at_mean},
      {"shift_includes_variance", cfg.guidance.shift_includes_variance},
  };
  json root = {
      {"input", cfg.input},
      {"output", cfg.output},
      {"reference", cfg.reference},
      {"pseudo_label_dir", cfg.pseudo_label_dir},
      {"guidance", std::move(g)},
      {"schedule",
       {{"steps", cfg.schedule.steps},
        {"beta_start", cfg.schedule.beta_start},
        {"beta_end", cfg.schedule.beta_end}}},
      {"predictor", predictor_spec(cfg.predictor)},
      {"labeler", cfg.labeler},
      {"resize", cfg.resize},
      {"workers", cfg.workers},
      {"export_degradation", cfg.export_degradation},
  };
  return root.dump(2) + "\n";
}

}  // namespace uwdiff
