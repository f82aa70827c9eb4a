#include "uwdiff/run.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <thread>
#include <vector>

#include "uwdiff/degradation.hpp"
#include "uwdiff/filters.hpp"
#include "uwdiff/guidance.hpp"
#include "uwdiff/image_io.hpp"
#include "uwdiff/metrics.hpp"
#include "uwdiff/pseudo_label.hpp"

namespace uwdiff {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".ppm";
}

std::vector<fs::path> list_inputs(const std::string& input) {
  const fs::path p(input);
  if (!fs::exists(p)) {
    throw std::invalid_argument("run: input path does not exist: " + input);
  }
  if (fs::is_regular_file(p)) return {p};
  std::vector<fs::path> files;
  for (const fs::directory_entry& e : fs::directory_iterator(p)) {
    if (e.is_regular_file() && has_image_extension(e.path())) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("run: cannot write " + path.string());
  }
  out << text;
}

Image load_resized(const fs::path& path, int resize) {
  Image img = load_image(path.string());
  if (resize > 0 && (img.height() != resize || img.width() != resize)) {
    img = resize_bilinear(img, resize, resize);
  }
  return img;
}

struct PerImage {
  bool ok = false;
  std::string error;
  MetricRow row;
};

PerImage process_one(const fs::path& file, const RunConfig& cfg,
                     const NoiseSchedule& sched,
                     const NoisePredictor& predictor,
                     const PseudoLabeler* labeler) {
  PerImage out;
  const std::string filename = file.filename().string();
  const std::string stem = file.stem().string();
  const fs::path outdir(cfg.output);
  try {
    const Image y = load_resized(file, cfg.resize);

    GuidanceConfig g = cfg.guidance;
    g.seed = cfg.guidance.seed ^ fnv1a64(filename);

    EnhanceRequest req;
    req.y = y;
    if (is_underwater(g.variant)) {
      DegradationParams params;
      params.background_light = estimate_background_light(y);
      params.transmission = estimate_transmission(y, params.background_light);
      if (cfg.export_degradation) {
        save_image(params.background_light,
                   (outdir / ("deg_A_" + stem + ".png")).string());
        // The transmission estimate lives in [0.1, 1] but carries the
        // workspace tag; retag a copy so the PNG writer accepts it.
        Image t_map = params.transmission;
        t_map.set_domain(Domain::Display01);
        save_image(t_map, (outdir / ("deg_T_" + stem + ".png")).string());
      }
      req.degradation = std::move(params);
    } else if (!cfg.pseudo_label_dir.empty()) {
      const fs::path label_path = fs::path(cfg.pseudo_label_dir) / filename;
      if (!fs::exists(label_path)) {
        throw std::runtime_error("no pseudo-label for " + filename + " in " +
                                 cfg.pseudo_label_dir);
      }
      req.pseudo_label = load_resized(label_path, cfg.resize);
    } else {
      req.pseudo_label = labeler->enhance(y);
    }

    const EnhanceResult result =
        g.sampler == SamplerKind::Ddpm
            ? guided_ddpm_enhance(req, g, predictor, sched)
            : guided_ddim_enhance(req, g, predictor, sched);

    save_image(result.x0, (outdir / (stem + ".png")).string());
    write_text_file(outdir / ("trace_" + stem + ".csv"),
                    result.trace.to_csv());
    for (const StepRecord& rec : result.trace.steps) {
      if (rec.snapshot.has_value()) {
        save_image(*rec.snapshot,
                   (outdir / ("snap_" + stem + "_t" + std::to_string(rec.t) +
                              ".png"))
                       .string());
      }
    }

    out.row.image = filename;
    out.row.uciqe = uciqe(result.x0);
    out.row.uiqm = uiqm(result.x0);
    if (!cfg.reference.empty()) {
      const fs::path ref_path = fs::path(cfg.reference) / filename;
      if (!fs::exists(ref_path)) {
        throw std::runtime_error("no reference for " + filename + " in " +
                                 cfg.reference);
      }
      const Image ref = load_resized(ref_path, cfg.resize);
      out.row.psnr = psnr(result.x0, ref);
      out.row.ssim = ssim(result.x0, ref);
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

int run(const RunConfig& cfg) {
  if (cfg.output.empty()) {
    throw std::invalid_argument("run: output directory required");
  }
  for (const std::string* dir :
       {&cfg.reference, &cfg.pseudo_label_dir}) {
    if (!dir->empty() && !fs::is_directory(*dir)) {
      throw std::invalid_argument("run: directory does not exist: " + *dir);
    }
  }

  const NoiseSchedule sched = NoiseSchedule::linear(
      cfg.schedule.steps, cfg.schedule.beta_start, cfg.schedule.beta_end);
  validate(cfg.guidance, sched);

  std::unique_ptr<NoisePredictor> predictor;
  if (cfg.predictor.kind == "gaussian") {
    predictor = std::make_unique<GaussianWorldPredictor>(
        sched, cfg.predictor.mean, cfg.predictor.variance);
  } else {
    predictor = std::make_unique<PrecomputedPredictor>(
        PrecomputedPredictor::load(cfg.predictor.path));
  }
  const std::unique_ptr<PseudoLabeler> labeler = make_labeler(cfg.labeler);

  const std::vector<fs::path> files = list_inputs(cfg.input);
  fs::create_directories(cfg.output);

  std::vector<PerImage> results(files.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
      std::min<std::size_t>(cfg.workers > 0 ? cfg.workers : hw, files.size());

  auto worker_body = [&](std::atomic<std::size_t>& next) {
    for (std::size_t i = next.fetch_add(1); i < files.size();
         i = next.fetch_add(1)) {
      results[i] = process_one(files[i], cfg, sched, *predictor, labeler.get());
    }
  };
  if (workers > 1) {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] { worker_body(next); });
    }
    for (std::thread& th : pool) th.join();
  } else {
    std::atomic<std::size_t> next{0};
    worker_body(next);
  }

  MetricReport report;
  report.has_reference = !cfg.reference.empty();
  int failures = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (results[i].ok) {
      report.rows.push_back(results[i].row);
    } else {
      ++failures;
      std::fprintf(stderr, "failed: %s: %s\n", files[i].string().c_str(),
                   results[i].error.c_str());
    }
  }
  write_text_file(fs::path(cfg.output) / "metrics.csv", report.to_csv());

  if (cfg.guidance.weights.lambda3 != 0.0 ||
      cfg.guidance.weights.lambda4 != 0.0) {
    std::printf(
        "note: lambda3/lambda4 drive the built-in colorfulness/contrast "
        "proxies, not learned quality assessors\n");
  }
  std::printf("enhanced %zu image(s), %d failure(s) -> %s\n",
              files.size() - static_cast<std::size_t>(failures), failures,
              cfg.output.c_str());
  return failures == 0 ? 0 : 1;
}

}  // namespace uwdiff
