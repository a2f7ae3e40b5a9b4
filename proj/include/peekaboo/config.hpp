// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "peekaboo/bilateral.hpp"
#include "peekaboo/losses.hpp"
#include "peekaboo/mask_bank.hpp"
#include "peekaboo/metrics.hpp"
#include "peekaboo/optim.hpp"

namespace peekaboo {

enum class BackendKind { kToy, kReplay };

BackendKind parse_backend(std::string_view text);
std::string_view to_string(BackendKind kind);

struct AugmentConfig {
  bool enabled = true;
  double scale_min = 0.1;
  double scale_max = 3.0;
  double blur_probability = 0.5;
  double blur_sigma_min = 0.1;
  double blur_sigma_max = 2.0;
  int blur_kernel = 5;

  void validate() const;
};

struct OptimizerConfig {
  HeadInit head_init = HeadInit::kZeros;
  double lr = 5e-2;
  ScheduleKind schedule = ScheduleKind::kCosine;
  double final_fraction = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct ToyBackendConfig {
  int patch = 8;
  int dim = 384;
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::uint64_t seed = 0;
  BackendKind backend = BackendKind::kToy;
  std::filesystem::path manifest;
  ToyBackendConfig toy;
  /// Feature dimension expected from the replay store.
  int replay_dim = 384;
  std::filesystem::path mask_dir;
  MaskMode mask_mode = MaskMode::kHigh;
  int working_size = kWorkingSize;
  LossConfig loss;
  SolverConfig solver;
  OptimizerConfig optimizer;
  AugmentConfig augment;
  int iterations = 500;
  int batch_size = 50;
  int checkpoint_every = 100;
  /// 0 selects the hardware concurrency. Never affects results.
  int workers = 0;
  MetricConfig metrics;
  /// Take CorLoc boxes from the refined mask rather than the raw prediction.
  bool corloc_from_refined = true;
  std::filesystem::path out_dir = "runs/default";

  /// Checks ranges and that referenced paths exist.
  void validate() const;
  /// 16 lowercase hex digits over every field that influences results.
  std::string hash() const;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep their defaults. Relative paths resolve against base_dir.
RunConfig run_config_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace peekaboo
