// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// Training, inference and evaluation over a dataset manifest.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "peekaboo/checkpoint.hpp"
#include "peekaboo/config.hpp"
#include "peekaboo/dataset.hpp"
#include "peekaboo/encoder.hpp"
#include "peekaboo/head.hpp"
#include "peekaboo/mask_bank.hpp"
#include "peekaboo/metrics.hpp"
#include "peekaboo/refine.hpp"

namespace peekaboo {

/// A refinement solve that failed numerically; the sample is redrawn.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

struct LoadedImage {
  DatasetEntry entry;
  /// Normalized, at working resolution.
  ImageTensor image;
  int native_height = 0;
  int native_width = 0;
  /// Native resolution, when the manifest provides one.
  std::optional<BinaryMask> ground_truth;
};

struct LoadedDataset {
  std::vector<LoadedImage> images;
  nlohmann::json metadata;
};

LoadedDataset load_dataset(const DatasetManifest& manifest, int working_size);

std::unique_ptr<EncoderBackend> make_backend(const RunConfig& cfg, const DatasetManifest& manifest);

struct IterationLog {
  std::int64_t iter = 0;
  double l_seg = 0.0;
  double l_mfp = 0.0;
  double l_pcl = 0.0;
  double l_pcl_literal = 0.0;
  double l_aux = 0.0;
  double l_total = 0.0;
  double lr = 0.0;
  int skipped = 0;
  int unconverged = 0;
};

nlohmann::json to_json(const IterationLog& log);

struct TrainInputs {
  const RunConfig* config = nullptr;
  const LoadedDataset* data = nullptr;
  const EncoderBackend* backend = nullptr;
  /// Required by the toy backend.
  const MaskBank* masks = nullptr;
  /// Starting point; defaults to initial_params(*config).
  std::optional<DecoderParams> initial;
  /// Write log, checkpoints and config under config->out_dir.
  bool write_outputs = true;
  /// Called after each optimizer step with the updated parameters.
  std::function<void(const IterationLog&, const DecoderParams&)> on_iteration;
};

struct TrainResult {
  Checkpoint final;
  std::vector<IterationLog> log;
  int skipped = 0;
  std::uint64_t backend_hash_before = 0;
  std::uint64_t backend_hash_after = 0;
};

DecoderParams initial_params(const RunConfig& cfg, int dim);

TrainResult train(const TrainInputs& in);

/// Loads the manifest, backend and mask bank named by cfg and trains.
TrainResult train(const RunConfig& cfg);

struct SampleOutcome {
  LossReport<float> losses;
  DecoderGrads grads;
  bool converged = true;
};

/// One Siamese training sample: both branches, refined targets, losses and
/// head gradients. masked_image is only read by backends that need pixels.
SampleOutcome training_sample(const DecoderParams& params, const EncoderBackend& backend,
                              const std::string& image_id, const ImageTensor& image,
                              const ImageTensor& masked_image, const FeatureVariant& masked_variant,
                              const RunConfig& cfg);

struct Inference {
  SoftMask raw;
  std::optional<BinaryMask> refined;
  bool converged = true;
};

Inference infer(const DecoderParams& params, const EncoderBackend& backend,
                const std::string& image_id, const ImageTensor& image, const SolverConfig& solver,
                bool refine = true);

/// Plain row from the raw prediction and, with bs, a "+BS" row from the refined mask.
std::vector<EvalReport> evaluate(const DecoderParams& params, const EncoderBackend& backend,
                                 const LoadedDataset& data, const RunConfig& cfg, bool bs = true,
                                 const std::string& dataset_name = "dataset");

/// Writes toy-encoder PKBF files for every image (unmasked plus `variants`
/// masked versions) and a manifest that lists them.
DatasetManifest export_toy_features(const DatasetManifest& manifest, const ToyEncoder& encoder,
                                    const MaskBank& masks, int variants, int working_size,
                                    const std::filesystem::path& out_dir);

}  // namespace peekaboo
