// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/config.hpp"

#include <fmt/format.h>

#include <fstream>

#include "peekaboo/random.hpp"

namespace peekaboo {

using nlohmann::json;

BackendKind parse_backend(std::string_view text) {
  if (text == "toy") return BackendKind::kToy;
  if (text == "replay") return BackendKind::kReplay;
  throw InvalidArgument("unknown backend '" + std::string(text) + "'");
}

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::kToy ? "toy" : "replay";
}

void AugmentConfig::validate() const {
  if (!(scale_min > 0.0 && scale_min <= scale_max)) {
    throw InvalidArgument("augment scale range must satisfy 0 < min <= max");
  }
  if (!(blur_probability >= 0.0 && blur_probability <= 1.0)) {
    throw InvalidArgument("augment blur_probability must lie in [0,1]");
  }
  if (!(blur_sigma_min > 0.0 && blur_sigma_min <= blur_sigma_max)) {
    throw InvalidArgument("augment blur sigma range must satisfy 0 < min <= max");
  }
  if (blur_kernel < 1 || blur_kernel % 2 == 0) {
    throw InvalidArgument("augment blur_kernel must be odd and positive");
  }
}

void RunConfig::validate() const {
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (checkpoint_every < 0) throw InvalidArgument("checkpoint_every must be >= 0");
  if (workers < 0) throw InvalidArgument("workers must be >= 0");
  if (working_size < ImageTensor::kMinSide) {
    throw InvalidArgument("working_size must be >= " + std::to_string(ImageTensor::kMinSide));
  }
  if (backend == BackendKind::kToy) {
    if (toy.patch < 1 || toy.dim < 1) throw InvalidArgument("toy patch and dim must be >= 1");
    if (working_size % toy.patch != 0) {
      throw InvalidArgument("working_size must be divisible by the toy patch size");
    }
  }
  if (replay_dim < 1) throw InvalidArgument("replay_dim must be >= 1");
  if (!(optimizer.lr > 0.0)) throw InvalidArgument("optimizer lr must be > 0");
  if (!(optimizer.final_fraction >= 0.0 && optimizer.final_fraction <= 1.0)) {
    throw InvalidArgument("optimizer final_fraction must lie in [0,1]");
  }
  loss.validate();
  solver.validate();
  augment.validate();
  metrics.validate();
  if (manifest.empty() || !std::filesystem::exists(manifest)) {
    throw InvalidArgument("manifest not found: '" + manifest.string() + "'");
  }
  if (backend == BackendKind::kToy &&
      (mask_dir.empty() || !std::filesystem::is_directory(mask_dir))) {
    throw InvalidArgument("mask_dir not found: '" + mask_dir.string() + "'");
  }
}

json to_json(const RunConfig& c) {
  return {
      {"seed", c.seed},
      {"backend", to_string(c.backend)},
      {"manifest", c.manifest.string()},
      {"toy", {{"patch", c.toy.patch}, {"dim", c.toy.dim}, {"seed", c.toy.seed}}},
      {"replay_dim", c.replay_dim},
      {"mask_dir", c.mask_dir.string()},
      {"mask_mode", to_string(c.mask_mode)},
      {"working_size", c.working_size},
      {"loss",
       {{"alpha", c.loss.alpha},
        {"aux_weight", c.loss.aux_weight},
        {"pcl_mode", to_string(c.loss.pcl_mode)},
        {"enable_mfp", c.loss.enable_mfp},
        {"enable_pcl", c.loss.enable_pcl}}},
      {"solver",
       {{"sigma_spatial", c.solver.sigma_spatial},
        {"sigma_luma", c.solver.sigma_luma},
        {"sigma_chroma", c.solver.sigma_chroma},
        {"lambda", c.solver.lambda},
        {"pcg_tol", c.solver.pcg_tol},
        {"pcg_max_iter", c.solver.pcg_max_iter}}},
      {"optimizer",
       {{"head_init", to_string(c.optimizer.head_init)},
        {"lr", c.optimizer.lr},
        {"schedule", to_string(c.optimizer.schedule)},
        {"final_fraction", c.optimizer.final_fraction},
        {"beta1", c.optimizer.beta1},
        {"beta2", c.optimizer.beta2},
        {"eps", c.optimizer.eps}}},
      {"augment",
       {{"enabled", c.augment.enabled},
        {"scale_min", c.augment.scale_min},
        {"scale_max", c.augment.scale_max},
        {"blur_probability", c.augment.blur_probability},
        {"blur_sigma_min", c.augment.blur_sigma_min},
        {"blur_sigma_max", c.augment.blur_sigma_max},
        {"blur_kernel", c.augment.blur_kernel}}},
      {"iterations", c.iterations},
      {"batch_size", c.batch_size},
      {"checkpoint_every", c.checkpoint_every},
      {"workers", c.workers},
      {"metrics",
       {{"corloc_iou_threshold", c.metrics.corloc_iou_threshold},
        {"beta_squared", c.metrics.beta_squared},
        {"f_beta_thresholds", c.metrics.f_beta_thresholds},
        {"max_f_beta", c.metrics.max_f_mode == MaxFMode::kMaxOfMeans ? "max_of_means"
                                                                      : "mean_of_maxima"}}},
      {"corloc_from_refined", c.corloc_from_refined},
      {"out_dir", c.out_dir.string()},
  };
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& into) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) into = it->get<T>();
}

std::filesystem::path resolve(const std::string& text, const std::filesystem::path& base) {
  if (text.empty()) return {};
  std::filesystem::path p(text);
  return p.is_relative() && !base.empty() ? (base / p).lexically_normal() : p;
}

}  // namespace

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  try {
    read(j, "seed", c.seed);
    std::string s;
    if (j.contains("backend")) c.backend = parse_backend(j.at("backend").get<std::string>());
    s.clear();
    read(j, "manifest", s);
    if (!s.empty()) c.manifest = resolve(s, base_dir);
    if (auto it = j.find("toy"); it != j.end()) {
      read(*it, "patch", c.toy.patch);
      read(*it, "dim", c.toy.dim);
      read(*it, "seed", c.toy.seed);
    }
    read(j, "replay_dim", c.replay_dim);
    s.clear();
    read(j, "mask_dir", s);
    if (!s.empty()) c.mask_dir = resolve(s, base_dir);
    if (j.contains("mask_mode")) c.mask_mode = parse_mask_mode(j.at("mask_mode").get<std::string>());
    read(j, "working_size", c.working_size);
    if (auto it = j.find("loss"); it != j.end()) {
      read(*it, "alpha", c.loss.alpha);
      read(*it, "aux_weight", c.loss.aux_weight);
      if (it->contains("pcl_mode")) {
        c.loss.pcl_mode = parse_pcl_mode(it->at("pcl_mode").get<std::string>());
      }
      read(*it, "enable_mfp", c.loss.enable_mfp);
      read(*it, "enable_pcl", c.loss.enable_pcl);
    }
    if (auto it = j.find("solver"); it != j.end()) {
      read(*it, "sigma_spatial", c.solver.sigma_spatial);
      read(*it, "sigma_luma", c.solver.sigma_luma);
      read(*it, "sigma_chroma", c.solver.sigma_chroma);
      read(*it, "lambda", c.solver.lambda);
      read(*it, "pcg_tol", c.solver.pcg_tol);
      read(*it, "pcg_max_iter", c.solver.pcg_max_iter);
    }
    if (auto it = j.find("optimizer"); it != j.end()) {
      if (it->contains("head_init")) {
        c.optimizer.head_init = parse_head_init(it->at("head_init").get<std::string>());
      }
      read(*it, "lr", c.optimizer.lr);
      if (it->contains("schedule")) {
        c.optimizer.schedule = parse_schedule(it->at("schedule").get<std::string>());
      }
      read(*it, "final_fraction", c.optimizer.final_fraction);
      read(*it, "beta1", c.optimizer.beta1);
      read(*it, "beta2", c.optimizer.beta2);
      read(*it, "eps", c.optimizer.eps);
    }
    if (auto it = j.find("augment"); it != j.end()) {
      read(*it, "enabled", c.augment.enabled);
      read(*it, "scale_min", c.augment.scale_min);
      read(*it, "scale_max", c.augment.scale_max);
      read(*it, "blur_probability", c.augment.blur_probability);
      read(*it, "blur_sigma_min", c.augment.blur_sigma_min);
      read(*it, "blur_sigma_max", c.augment.blur_sigma_max);
      read(*it, "blur_kernel", c.augment.blur_kernel);
    }
    read(j, "iterations", c.iterations);
    read(j, "batch_size", c.batch_size);
    read(j, "checkpoint_every", c.checkpoint_every);
    read(j, "workers", c.workers);
    if (auto it = j.find("metrics"); it != j.end()) {
      read(*it, "corloc_iou_threshold", c.metrics.corloc_iou_threshold);
      read(*it, "beta_squared", c.metrics.beta_squared);
      read(*it, "f_beta_thresholds", c.metrics.f_beta_thresholds);
      std::string mode;
      read(*it, "max_f_beta", mode);
      if (mode == "mean_of_maxima") {
        c.metrics.max_f_mode = MaxFMode::kMeanOfMaxima;
      } else if (!mode.empty() && mode != "max_of_means") {
        throw InvalidArgument("unknown max_f_beta mode '" + mode + "'");
      }
    }
    read(j, "corloc_from_refined", c.corloc_from_refined);
    s.clear();
    read(j, "out_dir", s);
    if (!s.empty()) c.out_dir = resolve(s, base_dir);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed run config: ") + e.what());
  }
  return c;
}

std::string RunConfig::hash() const {
  json j = to_json(*this);
  // Output location and thread count do not change results.
  j.erase("out_dir");
  j.erase("workers");
  const std::string text = j.dump();
  return fmt::format("{:016x}", fnv1a(text.data(), text.size()));
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path.string());
  out << to_json(cfg).dump(2) << "\n";
}

}  // namespace peekaboo
