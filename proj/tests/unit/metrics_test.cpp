// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "metric_oracle.hpp"
#include "peekaboo/metrics.hpp"

namespace peekaboo {
namespace {

TEST(MaskToBox, SinglePixel) {
  BinaryMask m(8, 8);
  m.set(3, 5, true);
  EXPECT_EQ(mask_to_box(m), (BoundingBox{5, 3, 5, 3}));
}

TEST(MaskToBox, LargestComponentWins) {
  BinaryMask m(12, 12);
  for (int i = 0; i < 4; ++i) m.set(0, i, true);  // size 4
  for (int y = 5; y < 7; ++y)
    for (int x = 3; x < 8; ++x) m.set(y, x, true);  // size 10
  EXPECT_EQ(mask_to_box(m), (BoundingBox{3, 5, 7, 6}));
}

TEST(MaskToBox, DiagonalPixelsAreConnected) {
  BinaryMask m(6, 6);
  for (int i = 0; i < 4; ++i) m.set(i, i, true);
  m.set(5, 0, true);
  EXPECT_EQ(mask_to_box(m), (BoundingBox{0, 0, 3, 3}));
}

TEST(MaskToBox, TieKeepsEarliestComponent) {
  BinaryMask m(6, 6);
  m.set(4, 0, true);
  m.set(4, 1, true);
  m.set(1, 4, true);
  m.set(1, 5, true);
  EXPECT_EQ(mask_to_box(m), (BoundingBox{4, 1, 5, 1}));
}

TEST(MaskToBox, FullFrameAndEmpty) {
  EXPECT_EQ(mask_to_box(BinaryMask(7, 9, 1)), (BoundingBox{0, 0, 8, 6}));
  EXPECT_THROW(mask_to_box(BinaryMask(7, 9, 0)), NoForeground);
}

TEST(BoxIou, Examples) {
  const BoundingBox a{0, 0, 9, 9};
  EXPECT_EQ(box_iou(a, a), 1.0);
  EXPECT_EQ(box_iou(a, {20, 20, 25, 25}), 0.0);
  EXPECT_DOUBLE_EQ(box_iou(a, {5, 0, 14, 9}), 1.0 / 3.0);
}

TEST(BoxIou, SymmetricBoundedAndMatchesEnumeration) {
  RandomStream rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto a = testing::random_box(rng, 16, 16), b = testing::random_box(rng, 16, 16);
    const double v = box_iou(a, b);
    EXPECT_EQ(v, box_iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v == 1.0, a == b);
    EXPECT_DOUBLE_EQ(v, testing::brute_box_iou(a, b));
  }
}

TEST(CorLoc, StrictHalfIsNotCorrect) {
  // 10x10 ground truth, 10x5 prediction inside it: IoU exactly 0.5.
  const BoundingBox gt{0, 0, 9, 9}, pred{0, 0, 9, 4};
  ASSERT_EQ(box_iou(pred, gt), 0.5);
  const auto r = corloc({pred}, {{gt}});
  EXPECT_EQ(r.correct, 0);
  EXPECT_EQ(r.percent, 0.0);
}

TEST(CorLoc, AnyGroundTruthBoxCounts) {
  const BoundingBox pred{10, 10, 19, 19};
  const std::vector<BoundingBox> gts{{0, 0, 3, 3}, {10, 10, 19, 17}, {30, 30, 31, 31}};
  ASSERT_NEAR(box_iou(pred, gts[1]), 0.8, 1e-12);
  EXPECT_EQ(corloc({pred}, {gts}).percent, 100.0);
}

TEST(CorLoc, ArithmeticMissesAndExclusions) {
  const BoundingBox g{0, 0, 9, 9};
  const auto r = corloc({g, g, BoundingBox{50, 50, 51, 51}, std::nullopt, g},
                        {{g}, {g}, {g}, {}, {}});
  EXPECT_EQ(r.counted, 3);
  EXPECT_EQ(r.excluded, 2);
  EXPECT_NEAR(r.percent, 66.6667, 1e-4);
  const auto miss = corloc({std::nullopt}, {{g}});
  EXPECT_EQ(miss.percent, 0.0);
  EXPECT_THROW(corloc({}, {}), InvalidArgument);
}

TEST(CorLoc, OrderInvariant) {
  RandomStream rng(2);
  std::vector<std::optional<BoundingBox>> p;
  std::vector<std::vector<BoundingBox>> g;
  for (int i = 0; i < 20; ++i) {
    p.push_back(testing::random_box(rng, 16, 16));
    g.push_back({testing::random_box(rng, 16, 16), testing::random_box(rng, 16, 16)});
  }
  const double base = corloc(p, g).percent;
  std::reverse(p.begin(), p.end());
  std::reverse(g.begin(), g.end());
  for (auto& boxes : g) std::reverse(boxes.begin(), boxes.end());
  EXPECT_EQ(corloc(p, g).percent, base);
}

TEST(FBeta, Formula) {
  EXPECT_DOUBLE_EQ(f_beta({1, 0, 0, 1}, 0.3), 1.3 * 0.5 / 0.8);
  EXPECT_EQ(f_beta({0, 0, 5, 5}, 0.3), 0.0);
}

TEST(Saliency, PerfectPrediction) {
  const auto gt = testing::random_binary(9, 9, 3);
  const auto s = saliency_scores(gt.as_soft<float>(), gt);
  EXPECT_EQ(s.accuracy, 1.0);
  EXPECT_EQ(*s.iou, 1.0);
  for (double f : s.f_beta) EXPECT_EQ(f, 1.0);
}

TEST(Saliency, DisjointPrediction) {
  BinaryMask gt(6, 6), pred(6, 6);
  gt.set(0, 0, true);
  pred.set(5, 5, true);
  const auto s = saliency_scores(pred.as_soft<float>(), gt);
  EXPECT_EQ(*s.iou, 0.0);
  for (double f : s.f_beta) EXPECT_EQ(f, 0.0);
}

TEST(Saliency, EmptyGroundTruthHasNoIou) {
  const auto s = saliency_scores(SoftMask(4, 4, 0.8f), BinaryMask(4, 4, 0));
  EXPECT_FALSE(s.iou);
  EXPECT_EQ(s.accuracy, 0.0);
}

TEST(Saliency, MatchesBruteForceExactly) {
  RandomStream rng(4);
  MetricConfig cfg;
  for (int i = 0; i < 50; ++i) {
    const int h = rng.uniform_int(1, 16), w = rng.uniform_int(1, 16);
    const auto pred = testing::quantized_soft(h, w, rng);
    const auto gt = testing::random_binary(h, w, rng(), rng.uniform(0.0, 1.0));
    const auto s = saliency_scores(pred, gt, cfg);
    const auto b = testing::brute_saliency(pred, gt, cfg.thresholds(), cfg.beta_squared);
    EXPECT_EQ(s.accuracy, b.accuracy);
    EXPECT_EQ(s.iou, b.iou);
    EXPECT_EQ(s.f_beta, b.f_beta);
  }
}

TEST(Saliency, ResizesPredictionToGroundTruth) {
  const auto s = saliency_scores(SoftMask(4, 4, 0.9f), BinaryMask(8, 8, 1));
  EXPECT_EQ(s.accuracy, 1.0);
}

TEST(Aggregate, MeansAndMaxOfMeans) {
  MetricConfig cfg;
  cfg.f_beta_thresholds = {0.25, 0.5, 0.75};
  std::vector<ImageRecord> recs(2);
  recs[0].saliency = SaliencyScores{0.9, 0.4, {0.2, 0.9, 0.1}};
  recs[1].saliency = SaliencyScores{0.7, 0.6, {0.8, 0.3, 0.2}};
  recs[0].box_hit = true;
  recs[1].box_hit = false;
  const auto a = aggregate(recs, cfg);
  EXPECT_DOUBLE_EQ(a.mean_iou, 0.5);
  EXPECT_DOUBLE_EQ(a.mean_accuracy, 0.8);
  EXPECT_DOUBLE_EQ(a.max_f_beta, 0.6);
  EXPECT_EQ(*a.corloc, 50.0);
  cfg.max_f_mode = MaxFMode::kMeanOfMaxima;
  EXPECT_DOUBLE_EQ(aggregate(recs, cfg).max_f_beta, 0.85);
}

TEST(Aggregate, SingleImageAndMaxDominatesHalf) {
  const auto gt = testing::random_binary(10, 10, 5);
  const auto pred = testing::random_soft(10, 10, 6);
  ImageRecord rec;
  rec.saliency = saliency_scores(pred, gt);
  const auto a = aggregate({rec});
  EXPECT_EQ(a.mean_accuracy, rec.saliency->accuracy);
  EXPECT_EQ(a.mean_iou, *rec.saliency->iou);
  EXPECT_GE(a.max_f_beta, a.mean_f_beta[127]);  // 128/256 = 0.5
}

TEST(Report, JsonRecordsMaxFMode) {
  EvalReport r;
  r.dataset = "synth";
  r.variant = "+BS";
  r.aggregate.corloc = 75.0;
  const auto j = to_json(r);
  EXPECT_EQ(j["metadata"]["max_f_beta"], "max_of_means");
  EXPECT_EQ(j["metadata"]["beta_squared"], 0.3);
  EXPECT_EQ(j["aggregate"]["corloc"], 75.0);
  const auto table = format_table({r});
  EXPECT_NE(table.find("maxFbeta"), std::string::npos);
  EXPECT_NE(table.find("75.0"), std::string::npos);
}

TEST(MetricConfig, Validation) {
  MetricConfig cfg;
  EXPECT_EQ(cfg.thresholds().size(), 255u);
  cfg.f_beta_thresholds = {0.5, 0.4};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.f_beta_thresholds = {0.0};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.beta_squared = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

}  // namespace
}  // namespace peekaboo
