// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/metrics.hpp"

#include "peekaboo/refine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>

namespace peekaboo {

void MetricConfig::validate() const {
  if (!(corloc_iou_threshold >= 0.0 && corloc_iou_threshold < 1.0)) {
    throw InvalidArgument("corloc_iou_threshold must lie in [0,1)");
  }
  if (!(beta_squared > 0.0)) throw InvalidArgument("beta_squared must be > 0");
  for (std::size_t i = 0; i < f_beta_thresholds.size(); ++i) {
    const double t = f_beta_thresholds[i];
    if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("F-beta thresholds must lie in (0,1)");
    if (i > 0 && !(t > f_beta_thresholds[i - 1])) {
      throw InvalidArgument("F-beta thresholds must be strictly increasing");
    }
  }
}

std::vector<double> MetricConfig::thresholds() const {
  if (!f_beta_thresholds.empty()) return f_beta_thresholds;
  std::vector<double> out(255);
  for (int k = 1; k <= 255; ++k) out[k - 1] = k / 256.0;
  return out;
}

BoundingBox mask_to_box(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  std::vector<int> label(mask.size(), -1);
  std::vector<int> stack;
  BoundingBox best;
  long long best_size = 0;
  int next = 0;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const std::size_t start = static_cast<std::size_t>(y0) * w + x0;
      if (!mask.data()[start] || label[start] >= 0) continue;
      BoundingBox box{x0, y0, x0, y0};
      long long size = 0;
      label[start] = next;
      stack.assign(1, static_cast<int>(start));
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int y = p / w;
        const int x = p % w;
        ++size;
        box.x_min = std::min(box.x_min, x);
        box.x_max = std::max(box.x_max, x);
        box.y_min = std::min(box.y_min, y);
        box.y_max = std::max(box.y_max, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy;
            const int nx = x + dx;
            if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
            const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
            if (mask.data()[q] && label[q] < 0) {
              label[q] = next;
              stack.push_back(static_cast<int>(q));
            }
          }
        }
      }
      // Components are discovered in scan order, so strict > keeps the earliest on ties.
      if (size > best_size) {
        best_size = size;
        best = box;
      }
      ++next;
    }
  }
  if (best_size == 0) throw NoForeground();
  return best;
}

double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const int ix0 = std::max(a.x_min, b.x_min);
  const int iy0 = std::max(a.y_min, b.y_min);
  const int ix1 = std::min(a.x_max, b.x_max);
  const int iy1 = std::min(a.y_max, b.y_max);
  long long inter = 0;
  if (ix1 >= ix0 && iy1 >= iy0) inter = static_cast<long long>(ix1 - ix0 + 1) * (iy1 - iy0 + 1);
  const long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

bool box_hit(const BoundingBox& pred, const std::vector<BoundingBox>& ground_truth,
             double iou_threshold) {
  return std::any_of(ground_truth.begin(), ground_truth.end(),
                     [&](const BoundingBox& g) { return box_iou(pred, g) > iou_threshold; });
}

CorLocResult corloc(const std::vector<std::optional<BoundingBox>>& predictions,
                    const std::vector<std::vector<BoundingBox>>& ground_truth,
                    const MetricConfig& cfg) {
  if (predictions.size() != ground_truth.size()) {
    throw ShapeError("corloc: prediction and ground-truth counts differ");
  }
  if (predictions.empty()) throw InvalidArgument("corloc needs at least one image");
  CorLocResult r;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (ground_truth[i].empty()) {
      ++r.excluded;
      continue;
    }
    ++r.counted;
    if (predictions[i] && box_hit(*predictions[i], ground_truth[i], cfg.corloc_iou_threshold)) {
      ++r.correct;
    }
  }
  r.percent = r.counted > 0 ? 100.0 * r.correct / r.counted : 0.0;
  return r;
}

Confusion confusion(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) {
    throw ShapeError("confusion: prediction and ground truth differ in size");
  }
  Confusion c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.data()[i];
    const bool g = gt.data()[i];
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f_beta(const Confusion& c, double beta_squared) {
  const double precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
  const double recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
  const double denom = beta_squared * precision + recall;
  if (denom == 0.0) return 0.0;
  return (1.0 + beta_squared) * precision * recall / denom;
}

SaliencyScores saliency_scores(const SoftMask& pred_in, const BinaryMask& gt,
                               const MetricConfig& cfg) {
  const SoftMask pred = pred_in.height() == gt.height() && pred_in.width() == gt.width()
                            ? pred_in
                            : resize_bilinear(pred_in, gt.height(), gt.width());
  const auto thresholds = cfg.thresholds();
  SaliencyScores s;
  const Confusion c = confusion(binarize(pred, 0.5), gt);
  s.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(gt.size());
  if (c.tp + c.fn > 0) {
    s.iou = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp + c.fn);
  }
  // One sorted pass instead of a full re-binarization per threshold.
  std::vector<float> fg_scores;
  std::vector<float> bg_scores;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    (gt.data()[i] ? fg_scores : bg_scores).push_back(pred.data()[i]);
  }
  std::sort(fg_scores.begin(), fg_scores.end());
  std::sort(bg_scores.begin(), bg_scores.end());
  s.f_beta.reserve(thresholds.size());
  for (double t : thresholds) {
    auto above = [t](const std::vector<float>& v) {
      return static_cast<long long>(
          v.end() - std::upper_bound(v.begin(), v.end(), t,
                                     [](double a, float b) { return a < static_cast<double>(b); }));
    };
    Confusion ct;
    ct.tp = above(fg_scores);
    ct.fn = static_cast<long long>(fg_scores.size()) - ct.tp;
    ct.fp = above(bg_scores);
    ct.tn = static_cast<long long>(bg_scores.size()) - ct.fp;
    s.f_beta.push_back(f_beta(ct, cfg.beta_squared));
  }
  return s;
}

EvalAggregate aggregate(const std::vector<ImageRecord>& images, const MetricConfig& cfg) {
  EvalAggregate a;
  const std::size_t nt = cfg.thresholds().size();
  a.mean_f_beta.assign(nt, 0.0);
  double acc = 0.0;
  double iou = 0.0;
  double max_sum = 0.0;
  int hits = 0;
  for (const auto& rec : images) {
    if (rec.box_hit) {
      ++a.corloc_images;
      hits += *rec.box_hit ? 1 : 0;
    }
    if (!rec.saliency) continue;
    const auto& s = *rec.saliency;
    if (s.f_beta.size() != nt) throw ShapeError("aggregate: F-beta threshold count mismatch");
    ++a.saliency_images;
    acc += s.accuracy;
    if (s.iou) {
      ++a.iou_images;
      iou += *s.iou;
    } else {
      ++a.iou_excluded;
    }
    for (std::size_t t = 0; t < nt; ++t) a.mean_f_beta[t] += s.f_beta[t];
    max_sum += nt > 0 ? *std::max_element(s.f_beta.begin(), s.f_beta.end()) : 0.0;
  }
  if (a.corloc_images > 0) a.corloc = 100.0 * hits / a.corloc_images;
  if (a.saliency_images > 0) {
    a.mean_accuracy = acc / a.saliency_images;
    for (auto& f : a.mean_f_beta) f /= a.saliency_images;
    if (cfg.max_f_mode == MaxFMode::kMaxOfMeans) {
      a.max_f_beta = nt > 0 ? *std::max_element(a.mean_f_beta.begin(), a.mean_f_beta.end()) : 0.0;
    } else {
      a.max_f_beta = max_sum / a.saliency_images;
    }
  }
  if (a.iou_images > 0) a.mean_iou = iou / a.iou_images;
  return a;
}

namespace {

nlohmann::json box_json(const BoundingBox& b) { return {b.x_min, b.y_min, b.x_max, b.y_max}; }

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  using nlohmann::json;
  const auto& a = report.aggregate;
  json images = json::array();
  for (const auto& rec : report.images) {
    json j = {{"image_id", rec.image_id}};
    if (rec.saliency) {
      j["accuracy"] = rec.saliency->accuracy;
      j["iou"] = rec.saliency->iou ? json(*rec.saliency->iou) : json(nullptr);
      j["f_beta"] = rec.saliency->f_beta;
    }
    j["predicted_box"] = rec.predicted_box ? box_json(*rec.predicted_box) : json(nullptr);
    j["box_hit"] = rec.box_hit ? json(*rec.box_hit) : json(nullptr);
    images.push_back(std::move(j));
  }
  return {
      {"dataset", report.dataset},
      {"variant", report.variant},
      {"metadata",
       {{"beta_squared", report.config.beta_squared},
        {"corloc_iou_threshold", report.config.corloc_iou_threshold},
        {"max_f_beta",
         report.config.max_f_mode == MaxFMode::kMaxOfMeans ? "max_of_means" : "mean_of_maxima"},
        {"thresholds", report.config.thresholds()}}},
      {"aggregate",
       {{"corloc", a.corloc ? json(*a.corloc) : json(nullptr)},
        {"corloc_images", a.corloc_images},
        {"accuracy", a.mean_accuracy},
        {"iou", a.mean_iou},
        {"max_f_beta", a.max_f_beta},
        {"saliency_images", a.saliency_images},
        {"iou_excluded", a.iou_excluded}}},
      {"images", std::move(images)},
  };
}

std::string format_table(const std::vector<EvalReport>& reports) {
  std::string out = fmt::format("{:<16} {:<8} {:>8} {:>8} {:>8} {:>9}\n", "dataset", "variant",
                                "CorLoc", "Acc", "IoU", "maxFbeta");
  for (const auto& r : reports) {
    const auto& a = r.aggregate;
    const std::string cl = a.corloc ? fmt::format("{:.1f}", *a.corloc) : std::string("-");
    out += fmt::format("{:<16} {:<8} {:>8} {:>8.1f} {:>8.1f} {:>9.1f}\n", r.dataset, r.variant, cl,
                       100.0 * a.mean_accuracy, 100.0 * a.mean_iou, 100.0 * a.max_f_beta);
  }
  return out;
}

}  // namespace peekaboo
