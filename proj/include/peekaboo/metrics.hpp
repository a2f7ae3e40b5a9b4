// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// Class-agnostic localization and saliency metrics.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "peekaboo/image.hpp"

namespace peekaboo {

enum class MaxFMode {
  kMaxOfMeans,  // max over thresholds of the dataset-mean F
  kMeanOfMaxima,
};

struct MetricConfig {
  double corloc_iou_threshold = 0.5;
  double beta_squared = 0.3;
  /// Strictly increasing, inside (0,1). Empty means k/256 for k = 1..255.
  std::vector<double> f_beta_thresholds;
  MaxFMode max_f_mode = MaxFMode::kMaxOfMeans;

  void validate() const;
  std::vector<double> thresholds() const;
};

class NoForeground : public Error {
 public:
  NoForeground() : Error("mask has no foreground") {}
};

/// Tight box around the largest 8-connected foreground component.
BoundingBox mask_to_box(const BinaryMask& mask);

double box_iou(const BoundingBox& a, const BoundingBox& b);

/// True iff some ground-truth box overlaps pred with IoU strictly above the threshold.
bool box_hit(const BoundingBox& pred, const std::vector<BoundingBox>& ground_truth,
             double iou_threshold = 0.5);

struct CorLocResult {
  double percent = 0.0;
  int correct = 0;
  int counted = 0;
  int excluded = 0;  // images without ground-truth boxes
};

/// A missing prediction counts as a miss.
CorLocResult corloc(const std::vector<std::optional<BoundingBox>>& predictions,
                    const std::vector<std::vector<BoundingBox>>& ground_truth,
                    const MetricConfig& cfg = {});

struct Confusion {
  long long tp = 0;
  long long fp = 0;
  long long tn = 0;
  long long fn = 0;
};

Confusion confusion(const BinaryMask& pred, const BinaryMask& gt);

/// (1+b2) P R / (b2 P + R), 0 when the denominator vanishes.
double f_beta(const Confusion& c, double beta_squared);

struct SaliencyScores {
  double accuracy = 0.0;
  /// Absent when the ground truth has no foreground.
  std::optional<double> iou;
  std::vector<double> f_beta;  // one per threshold
};

/// pred is resized to the ground-truth resolution when needed.
SaliencyScores saliency_scores(const SoftMask& pred, const BinaryMask& gt,
                               const MetricConfig& cfg = {});

struct ImageRecord {
  std::string image_id;
  std::optional<SaliencyScores> saliency;
  std::optional<BoundingBox> predicted_box;
  std::optional<bool> box_hit;  // absent without ground-truth boxes
};

struct EvalAggregate {
  std::optional<double> corloc;
  int corloc_images = 0;
  double mean_accuracy = 0.0;
  double mean_iou = 0.0;
  double max_f_beta = 0.0;
  std::vector<double> mean_f_beta;  // per threshold
  int saliency_images = 0;
  int iou_images = 0;
  int iou_excluded = 0;
};

struct EvalReport {
  std::string dataset;
  std::string variant;  // e.g. "plain" or "+BS"
  std::vector<ImageRecord> images;
  EvalAggregate aggregate;
  MetricConfig config;
};

EvalAggregate aggregate(const std::vector<ImageRecord>& images, const MetricConfig& cfg = {});

nlohmann::json to_json(const EvalReport& report);

/// Aligned-columns table, one row per report.
std::string format_table(const std::vector<EvalReport>& reports);

}  // namespace peekaboo
