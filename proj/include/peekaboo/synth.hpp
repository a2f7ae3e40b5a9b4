// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic blob dataset and irregular-mask fixtures for self-contained runs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "peekaboo/dataset.hpp"
#include "peekaboo/image.hpp"

namespace peekaboo {

struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double rx = 1.0;
  double ry = 1.0;
};

struct SyntheticSpec {
  int image_count = 64;
  int image_size = 64;
  int min_blobs = 1;
  int max_blobs = 3;
  double min_radius = 6.0;
  double max_radius = 16.0;
  /// Peak-to-peak 0..255 amplitude of the background texture.
  double texture_amplitude = 60.0;
  /// Mean 0..255 grey level of the background; blobs are drawn brighter.
  double background_level = 70.0;
  std::uint64_t seed = 0;
  /// Irregular occlusion masks written next to the dataset.
  int mask_count = 48;

  void validate() const;
};

struct SyntheticSample {
  std::string image_id;
  ImageTensor raw;  // 0..255
  std::vector<Ellipse> blobs;
  BinaryMask ground_truth;
  std::vector<BoundingBox> boxes;
};

/// Pixel centres (x, y) with ((x-cx)/rx)^2 + ((y-cy)/ry)^2 <= 1.
BinaryMask rasterize_ellipse(const Ellipse& e, int height, int width);

SyntheticSample make_synthetic_sample(const SyntheticSpec& spec, int index);

/// Streaks and holes; 1 keeps a pixel. The hidden fraction is close to target_zero_fraction.
ScribbleMask make_irregular_mask(int height, int width, double target_zero_fraction,
                                 std::uint64_t seed);

/// Writes images/, ground_truth/, masks/ and manifest.json under out_dir and
/// returns the manifest.
DatasetManifest generate_synthetic_dataset(const SyntheticSpec& spec,
                                           const std::filesystem::path& out_dir);

}  // namespace peekaboo
