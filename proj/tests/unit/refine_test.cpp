// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "peekaboo/refine.hpp"
#include "peekaboo/synth.hpp"
#include "test_support.hpp"

namespace peekaboo {
namespace {

BinaryMask boundary(const BinaryMask& m) {
  BinaryMask out(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m(y, x)) continue;
      bool edge = false;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || xx < 0 || yy >= m.height() || xx >= m.width() || !m(yy, xx)) edge = true;
        }
      out.set(y, x, edge);
    }
  }
  return out;
}

// Boundary F-score with a one-pixel matching tolerance.
double boundary_f(const BinaryMask& pred, const BinaryMask& gt) {
  const auto bp = boundary(pred), bg = boundary(gt);
  auto near = [](const BinaryMask& b, int y, int x) {
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int yy = y + dy, xx = x + dx;
        if (yy >= 0 && xx >= 0 && yy < b.height() && xx < b.width() && b(yy, xx)) return true;
      }
    return false;
  };
  double hit_p = 0, np = 0, hit_g = 0, ng = 0;
  for (int y = 0; y < gt.height(); ++y)
    for (int x = 0; x < gt.width(); ++x) {
      if (bp(y, x)) {
        ++np;
        hit_p += near(bg, y, x);
      }
      if (bg(y, x)) {
        ++ng;
        hit_g += near(bp, y, x);
      }
    }
  if (np == 0 || ng == 0) return 0.0;
  const double p = hit_p / np, r = hit_g / ng;
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

TEST(Binarize, StrictThreshold) {
  Plane<float> p(1, 3);
  p(0, 0) = 0.49f;
  p(0, 1) = 0.51f;
  p(0, 2) = 0.5f;
  const auto b = binarize(SoftMask(p));
  EXPECT_EQ(b(0, 0), 0);
  EXPECT_EQ(b(0, 1), 1);
  EXPECT_EQ(b(0, 2), 0);
  EXPECT_THROW(binarize(SoftMask(p), 1.0), InvalidArgument);
  EXPECT_THROW(binarize(SoftMask(p), 0.0), InvalidArgument);
}

TEST(Binarize, IdempotentOnBinaryInput) {
  const auto m = testing::random_binary(9, 7, 1);
  EXPECT_EQ(binarize(m.as_soft<float>()), m);
  const auto soft = testing::random_soft(9, 7, 2);
  EXPECT_EQ(binarize(binarize(soft).as_soft<float>()), binarize(soft));
}

TEST(Zeta, AllOnesStaysAllOnes) {
  const auto ref = normalize_image(testing::random_image(32, 32, 3));
  const auto z = zeta(SoftMask(32, 32, 1.0f), ref, SolverConfig{});
  EXPECT_EQ(z.count_ones(), 32u * 32u);
  const auto zero = zeta(SoftMask(32, 32, 0.2f), ref, SolverConfig{});
  EXPECT_EQ(zero.count_ones(), 0u);
}

TEST(Zeta, ShapeMismatchRejected) {
  const auto ref = normalize_image(testing::random_image(16, 16, 4));
  EXPECT_THROW(zeta(SoftMask(16, 8, 1.0f), ref, SolverConfig{}), ShapeError);
}

// Smooth random field: a few random Gaussian bumps.
SoftMask smooth_mask(int size, std::uint64_t seed) {
  RandomStream rng(seed);
  Plane<float> p(size, size);
  std::vector<std::array<double, 4>> bumps(4);
  for (auto& b : bumps) b = {rng.uniform(0, size), rng.uniform(0, size), rng.uniform(4, 12), rng.uniform(-1, 1)};
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double s = 0;
      for (const auto& b : bumps) {
        const double d2 = (x - b[0]) * (x - b[0]) + (y - b[1]) * (y - b[1]);
        s += b[3] * std::exp(-d2 / (2 * b[2] * b[2]));
      }
      p(y, x) = static_cast<float>(1.0 / (1.0 + std::exp(-4 * s)));
    }
  return SoftMask(std::move(p));
}

TEST(Zeta, NearlyIdempotentOnSmoothInputs) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SyntheticSpec spec;
    spec.seed = seed;
    const auto sample = make_synthetic_sample(spec, 0);
    const auto grid = make_reference_grid(normalize_image(sample.raw), SolverConfig{});
    const auto once = zeta(smooth_mask(64, seed + 10), grid, SolverConfig{});
    const auto twice = zeta(once.as_soft<float>(), grid, SolverConfig{});
    std::size_t agree = 0;
    for (std::size_t i = 0; i < once.size(); ++i) agree += once.data()[i] == twice.data()[i];
    EXPECT_GE(static_cast<double>(agree) / once.size(), 0.95) << seed;
  }
}

TEST(Zeta, SnapsFuzzyBlobToReferenceEdges) {
  const int s = 64;
  ImageTensor raw(s, s);
  const auto gt = rasterize_ellipse({32, 32, 12, 10}, s, s);
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x) {
      const bool on = gt(y, x);
      raw(y, x, 0) = on ? 220.0f : 40.0f;
      raw(y, x, 1) = on ? 60.0f : 90.0f;
      raw(y, x, 2) = on ? 60.0f : 40.0f;
    }
  Plane<float> fuzzy(s, s);
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x) {
      const double r = std::hypot((x - 34.0) / 15.0, (y - 33.0) / 13.0);
      fuzzy(y, x) = static_cast<float>(1.0 / (1.0 + std::exp(8.0 * (r - 1.0))));
    }
  const SoftMask soft(fuzzy);
  const auto before = binarize(soft);
  const auto after = zeta(soft, normalize_image(raw), SolverConfig{});
  EXPECT_GT(boundary_f(after, gt), boundary_f(before, gt));
  EXPECT_GT(boundary_f(after, gt), 0.9);
}

}  // namespace
}  // namespace peekaboo
