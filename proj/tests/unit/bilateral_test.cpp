// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "bilateral_oracle.hpp"
#include "peekaboo/bilateral.hpp"
#include "test_support.hpp"

namespace peekaboo {
namespace {

using testing::random_image;

SolverConfig fine_config() {
  SolverConfig cfg;
  cfg.sigma_spatial = 3.0;
  cfg.sigma_luma = 12.0;
  cfg.sigma_chroma = 6.0;
  cfg.lambda = 30.0;
  cfg.pcg_tol = 1e-10;
  cfg.pcg_max_iter = 2000;
  return cfg;
}

Plane<float> binary_target(int h, int w, std::uint64_t seed) {
  return testing::random_binary(h, w, seed).as_real<float>();
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.max_iterations(), 125);
  cfg.sigma_luma = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.lambda = -1;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.pcg_tol = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(RgbToYuv, Bt601) {
  ImageTensor img(8, 8);
  img(0, 0, 0) = 255;
  img(0, 1, 1) = 255;
  img(0, 2, 2) = 255;
  for (int c = 0; c < 3; ++c) img(0, 3, c) = 200;
  const auto yuv = rgb_to_yuv(img);
  EXPECT_NEAR(yuv(0, 0, 0), 76.245, 1e-3);
  EXPECT_NEAR(yuv(0, 0, 2), 255.5, 1e-3);
  EXPECT_NEAR(yuv(0, 1, 0), 149.685, 1e-3);
  EXPECT_NEAR(yuv(0, 2, 1), 255.5, 1e-3);
  EXPECT_NEAR(yuv(0, 3, 0), 200.0, 1e-3);
  EXPECT_NEAR(yuv(0, 3, 1), 128.0, 1e-3);
  EXPECT_NEAR(yuv(0, 3, 2), 128.0, 1e-3);
}

TEST(BilateralGrid, EveryPixelHasOneVertexWithDistinctCoordinates) {
  const auto img = random_image(12, 10, 1);
  const BilateralGrid grid(img, fine_config());
  ASSERT_EQ(grid.pixel_count(), 120u);
  std::set<std::vector<int>> seen;
  for (std::size_t v = 0; v < grid.vertex_count(); ++v) {
    const auto c = grid.vertex_coords().subspan(v * 5, 5);
    EXPECT_TRUE(seen.insert({c.begin(), c.end()}).second);
  }
  for (int v : grid.vertex_of_pixel()) {
    EXPECT_GE(v, 0);
    EXPECT_LT(v, static_cast<int>(grid.vertex_count()));
  }
  const auto counts = grid.splat(std::vector<double>(120, 1.0));
  double total = 0;
  for (double c : counts) {
    EXPECT_GE(c, 1.0);
    total += c;
  }
  EXPECT_EQ(total, 120.0);
}

TEST(BilateralGrid, ConstantImageIsOneVertexPerSpatialCell) {
  const BilateralGrid grid(ImageTensor(16, 16, 90.0f), SolverConfig{4, 16, 8, 30, 1e-5, 0});
  EXPECT_EQ(grid.vertex_count(), 16u);
}

TEST(BilateralGrid, BistochasticNormalizationMapsOnesToOnes) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BilateralGrid grid(random_image(16, 16, seed), fine_config());
    const auto n = grid.bistochastic_n();
    const auto m = grid.bistochastic_m();
    std::vector<double> nv(n.begin(), n.end());
    const auto bn = grid.blur(nv);
    for (std::size_t v = 0; v < nv.size(); ++v) EXPECT_NEAR(n[v] * bn[v] / m[v], 1.0, 1e-3);
  }
}

TEST(BilateralGrid, BlurMatchesDenseAdjacency) {
  const BilateralGrid grid(testing::oracle_image(8, 8, 3), fine_config());
  EXPECT_GT(testing::blur_edge_count(grid), 0u);
  const auto dense = testing::assemble_dense(grid);
  std::vector<double> x(grid.vertex_count());
  RandomStream rng(4);
  for (auto& v : x) v = rng.normal();
  const auto bx = grid.blur(x);
  const Eigen::VectorXd ref = dense.blur * Eigen::Map<Eigen::VectorXd>(x.data(), x.size());
  for (std::size_t v = 0; v < x.size(); ++v) EXPECT_NEAR(bx[v], ref[v], 1e-12);
}

TEST(BilateralSolve, MatchesDenseDirectSolve) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto img = testing::oracle_image(8, 8, 10 + seed);
    auto cfg = fine_config();
    cfg.sigma_spatial = 2.0 + static_cast<double>(seed % 3);
    const auto t = binary_target(8, 8, 20 + seed);
    const Plane<float> conf(8, 8, 1.0f);
    const BilateralGrid grid(img, cfg);
    EXPECT_GT(testing::blur_edge_count(grid), 0u);
    const auto res = bilateral_solve(grid, t, conf, cfg);
    EXPECT_TRUE(res.converged);
    const auto ref = testing::dense_solve(grid, cfg, {t.data().begin(), t.data().end()},
                                          std::vector<double>(64, 1.0));
    for (std::size_t p = 0; p < 64; ++p) EXPECT_NEAR(res.output.data()[p], ref[p], 1e-5);
  }
}

TEST(BilateralSolve, ConstantTargetIsPreserved) {
  for (double c0 : {0.0, 0.37, 1.0}) {
    const Plane<float> t(16, 16, static_cast<float>(c0));
    const auto res = bilateral_solve(random_image(16, 16, 5), t, Plane<float>(16, 16, 1.0f),
                                     SolverConfig{});
    for (float v : res.output.data()) EXPECT_NEAR(v, c0, 1e-5);
  }
}

TEST(BilateralSolve, ZeroLambdaReturnsTargetWhereConfident) {
  auto cfg = fine_config();
  cfg.lambda = 0.0;
  cfg.sigma_spatial = 1.0;  // one vertex per pixel
  const auto t = testing::random_soft(10, 10, 6).plane();
  Plane<float> conf(10, 10, 1.0f);
  for (int i = 0; i < 10; ++i) conf(i, 3) = 0.0f;
  const auto res = bilateral_solve(random_image(10, 10, 7), t, conf, cfg);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x)
      if (conf(y, x) > 0) EXPECT_NEAR(res.output(y, x), t(y, x), 1e-6);
}

TEST(BilateralSolve, OutputInUnitRangeAndResidualHonest) {
  const auto img = random_image(24, 24, 8);
  const auto t = binary_target(24, 24, 9);
  Plane<float> conf(24, 24);
  RandomStream rng(10);
  for (auto& v : conf.data()) v = static_cast<float>(rng.uniform(0.1, 2.0));
  SolverConfig cfg;
  const BilateralGrid grid(img, cfg);
  const auto res = bilateral_solve(grid, t, conf, cfg);
  for (float v : res.output.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  std::vector<double> c(conf.data().begin(), conf.data().end()), ct(c.size());
  for (std::size_t p = 0; p < c.size(); ++p) ct[p] = c[p] * t.data()[p];
  const auto sc = grid.splat(c);
  const auto b = grid.splat(ct);
  const auto ay = apply_system(grid, cfg, sc, res.vertex_solution);
  double rn = 0, bn = 0;
  for (std::size_t v = 0; v < b.size(); ++v) {
    rn += (b[v] - ay[v]) * (b[v] - ay[v]);
    bn += b[v] * b[v];
  }
  EXPECT_NEAR(std::sqrt(rn / bn), res.relative_residual, 1e-12);
  if (res.converged) EXPECT_LE(res.relative_residual, cfg.pcg_tol);
}

TEST(BilateralSolve, IterationCapReportsNonConvergence) {
  auto cfg = fine_config();
  cfg.pcg_max_iter = 1;
  cfg.pcg_tol = 1e-14;
  // A smooth ramp keeps lattice vertices connected so the system is not diagonal.
  ImageTensor ramp(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (int c = 0; c < 3; ++c) ramp(y, x, c) = static_cast<float>(8 * x + 4 * y);
  const auto res = bilateral_solve(ramp, binary_target(16, 16, 12),
                                   Plane<float>(16, 16, 1.0f), cfg);
  EXPECT_FALSE(res.converged);
  EXPECT_LE(res.iterations, 1);
}

TEST(BilateralSolve, DegenerateInputsRejected) {
  const auto img = random_image(8, 8, 13);
  const Plane<float> t(8, 8, 0.5f);
  EXPECT_THROW(bilateral_solve(img, t, Plane<float>(8, 8, 0.0f), SolverConfig{}), InvalidArgument);
  Plane<float> neg(8, 8, 1.0f);
  neg(2, 2) = -1.0f;
  EXPECT_THROW(bilateral_solve(img, t, neg, SolverConfig{}), InvalidArgument);
  EXPECT_THROW(bilateral_solve(img, Plane<float>(8, 9, 0.5f), Plane<float>(8, 9, 1.0f), SolverConfig{}),
               ShapeError);
}

}  // namespace
}  // namespace peekaboo
