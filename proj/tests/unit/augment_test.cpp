// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "peekaboo/augment.hpp"
#include "peekaboo/synth.hpp"
#include "test_support.hpp"

namespace peekaboo {
namespace {

// Foreground pixels of a bright square on a dark canvas.
std::size_t bright_area(const ImageTensor& img) {
  std::size_t n = 0;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) n += img(y, x, 0) > 0.5f;
  return n;
}

ImageTensor square_image(int n, int half) {
  ImageTensor img(n, n, 0.0f);
  for (int y = n / 2 - half; y < n / 2 + half; ++y)
    for (int x = n / 2 - half; x < n / 2 + half; ++x)
      for (int c = 0; c < 3; ++c) img(y, x, c) = 1.0f;
  return img;
}

TEST(Augment, IdentityDrawLeavesImageUnchanged) {
  const auto img = testing::random_image(16, 16, 1);
  const auto out = augment(img, AugmentDraw{1.0, false, 0.0});
  EXPECT_TRUE(std::equal(img.data().begin(), img.data().end(), out.data().begin()));
}

TEST(Augment, DisabledConfigIsIdentity) {
  AugmentConfig cfg;
  cfg.enabled = false;
  RandomStream rng(3);
  const auto img = testing::random_image(16, 16, 2);
  const auto out = augment(img, cfg, rng);
  EXPECT_TRUE(std::equal(img.data().begin(), img.data().end(), out.data().begin()));
}

TEST(Augment, ScaleTwoQuadruplesArea) {
  const auto img = square_image(64, 6);
  const double before = static_cast<double>(bright_area(img));
  const double after = static_cast<double>(bright_area(scale_about_center(img, 2.0)));
  EXPECT_NEAR(after / before, 4.0, 0.4);
}

TEST(Augment, ShrinkPadsWithZero) {
  const ImageTensor img(16, 16, 5.0f);
  const auto out = scale_about_center(img, 0.5);
  EXPECT_EQ(out(0, 0, 0), 0.0f);
  EXPECT_EQ(out(15, 15, 2), 0.0f);
  EXPECT_NEAR(out(8, 8, 1), 5.0f, 1e-5);
}

TEST(Augment, BlurPreservesConstantsAndMean) {
  const ImageTensor flat(12, 12, 3.0f);
  const auto blurred = gaussian_blur(flat, 1.5, 5);
  for (float v : blurred.data()) EXPECT_NEAR(v, 3.0f, 1e-5);
  EXPECT_THROW(gaussian_blur(flat, 1.0, 4), InvalidArgument);
  EXPECT_THROW(gaussian_blur(flat, 0.0, 5), InvalidArgument);
}

TEST(Augment, DrawsAreDeterministicAndInRange) {
  AugmentConfig cfg;
  RandomStream a(11), b(11);
  const auto img = testing::random_image(16, 16, 4);
  for (int i = 0; i < 20; ++i) {
    const auto da = draw_augment(cfg, a);
    const auto db = draw_augment(cfg, b);
    EXPECT_EQ(da.scale, db.scale);
    EXPECT_EQ(da.blur, db.blur);
    EXPECT_GE(da.scale, cfg.scale_min);
    EXPECT_LE(da.scale, cfg.scale_max);
    EXPECT_GE(da.sigma, cfg.blur_sigma_min);
    EXPECT_LE(da.sigma, cfg.blur_sigma_max);
  }
  RandomStream c(5), d(5);
  const auto x = augment(img, cfg, c);
  const auto y = augment(img, cfg, d);
  EXPECT_TRUE(std::equal(x.data().begin(), x.data().end(), y.data().begin()));
}

TEST(Synth, EllipseRasterBoxAndArea) {
  const auto m = rasterize_ellipse({32, 32, 8, 6}, 64, 64);
  EXPECT_EQ(mask_to_box(m), (BoundingBox{24, 26, 40, 38}));
  EXPECT_NEAR(static_cast<double>(m.count_ones()), std::numbers::pi * 8 * 6, 0.05 * std::numbers::pi * 48);
}

TEST(Synth, SamplesAreDeterministic) {
  SyntheticSpec spec;
  const auto a = make_synthetic_sample(spec, 3);
  const auto b = make_synthetic_sample(spec, 3);
  EXPECT_EQ(a.image_id, b.image_id);
  EXPECT_TRUE(std::equal(a.raw.data().begin(), a.raw.data().end(), b.raw.data().begin()));
  EXPECT_EQ(a.boxes, b.boxes);
  spec.seed = 1;
  const auto c = make_synthetic_sample(spec, 3);
  EXPECT_FALSE(std::equal(a.raw.data().begin(), a.raw.data().end(), c.raw.data().begin()));
}

TEST(Synth, GroundTruthIsUnionOfBlobs) {
  const SyntheticSpec spec;
  for (int i = 0; i < 5; ++i) {
    const auto s = make_synthetic_sample(spec, i);
    ASSERT_EQ(s.blobs.size(), s.boxes.size());
    ASSERT_GE(s.blobs.size(), 1u);
    BinaryMask u(spec.image_size, spec.image_size);
    for (const auto& e : s.blobs) {
      const auto m = rasterize_ellipse(e, spec.image_size, spec.image_size);
      for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
          if (m(y, x)) u.set(y, x, true);
    }
    EXPECT_TRUE(std::equal(u.data().begin(), u.data().end(), s.ground_truth.data().begin()));
    for (float v : s.raw.data()) {
      EXPECT_GE(v, 0.0f);
      EXPECT_LE(v, 255.0f);
    }
  }
}

TEST(Synth, IrregularMaskHitsTarget) {
  for (double target : {0.2, 0.5, 0.8}) {
    const auto m = make_irregular_mask(64, 64, target, 9);
    EXPECT_GE(m.zero_fraction(), target);
    EXPECT_LT(m.zero_fraction(), target + 0.2);
  }
  EXPECT_THROW(make_irregular_mask(8, 8, 1.0, 0), InvalidArgument);
}

TEST(Synth, DatasetOnDisk) {
  const auto dir = testing::scratch_dir("synth_disk");
  SyntheticSpec spec;
  spec.image_count = 3;
  spec.mask_count = 4;
  const auto manifest = generate_synthetic_dataset(spec, dir);
  ASSERT_EQ(manifest.entries.size(), 3u);
  const auto back = read_manifest(dir / "manifest.json");
  EXPECT_EQ(back.entries[2].ground_truth_boxes, manifest.entries[2].ground_truth_boxes);
  EXPECT_EQ(back.metadata["generator"], "synthetic_blobs");
  int masks = 0;
  for ([[maybe_unused]] const auto& f : std::filesystem::directory_iterator(dir / "masks")) ++masks;
  EXPECT_EQ(masks, 4);
}

TEST(Synth, SpecValidation) {
  SyntheticSpec spec;
  spec.max_radius = 40;
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec = {};
  spec.background_level = 300;
  EXPECT_THROW(spec.validate(), InvalidArgument);
}

}  // namespace
}  // namespace peekaboo
