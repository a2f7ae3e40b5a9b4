// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/synth.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

#include "peekaboo/image_io.hpp"
#include "peekaboo/metrics.hpp"
#include "peekaboo/random.hpp"

namespace peekaboo {

namespace {

constexpr std::uint64_t kImageKey = 0x696d67;
constexpr std::uint64_t kMaskKey = 0x6d736b;

void stamp_disc(Plane<std::uint8_t>& keep, double cx, double cy, double r) {
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - r)));
  const int y1 = std::min(keep.height() - 1, static_cast<int>(std::ceil(cy + r)));
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - r)));
  const int x1 = std::min(keep.width() - 1, static_cast<int>(std::ceil(cx + r)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= r * r) keep(y, x) = 0;
    }
  }
}

double hidden_fraction(const Plane<std::uint8_t>& keep) {
  std::size_t zeros = 0;
  for (auto v : keep.data()) zeros += v == 0;
  return static_cast<double>(zeros) / static_cast<double>(keep.size());
}

}  // namespace

void SyntheticSpec::validate() const {
  if (image_count < 1) throw InvalidArgument("image_count must be >= 1");
  if (image_size < ImageTensor::kMinSide) throw InvalidArgument("image_size too small");
  if (min_blobs < 1 || max_blobs < min_blobs) throw InvalidArgument("bad blob count range");
  if (!(min_radius >= 1.0 && max_radius >= min_radius)) throw InvalidArgument("bad radius range");
  if (2.0 * max_radius >= image_size) throw InvalidArgument("blob radii do not fit the image");
  if (!(texture_amplitude >= 0.0)) throw InvalidArgument("texture_amplitude must be >= 0");
  if (!(background_level >= 0.0 && background_level <= 255.0)) {
    throw InvalidArgument("background_level must lie in [0,255]");
  }
  if (mask_count < 0) throw InvalidArgument("mask_count must be >= 0");
}

BinaryMask rasterize_ellipse(const Ellipse& e, int height, int width) {
  BinaryMask m(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = (x - e.cx) / e.rx;
      const double dy = (y - e.cy) / e.ry;
      if (dx * dx + dy * dy <= 1.0) m.set(y, x, true);
    }
  }
  return m;
}

SyntheticSample make_synthetic_sample(const SyntheticSpec& spec, int index) {
  spec.validate();
  RandomStream rng(spec.seed, {kImageKey, static_cast<std::uint64_t>(index)});
  const int n = spec.image_size;
  SyntheticSample s;
  s.image_id = fmt::format("synth_{:04d}", index);
  s.raw = ImageTensor(n, n);

  // Background: a gentle oriented wave plus per-pixel grain.
  const double theta = rng.uniform(0.0, std::numbers::pi);
  const double freq = rng.uniform(0.3, 0.8);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double amp = spec.texture_amplitude;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double wave = 0.25 * amp *
                          std::sin(freq * (x * std::cos(theta) + y * std::sin(theta)) + phase);
      const double grain = amp * (rng.uniform01() - 0.5);
      for (int c = 0; c < 3; ++c) {
        const double tint = 0.15 * amp * (rng.uniform01() - 0.5);
        s.raw(y, x, c) = static_cast<float>(std::clamp(spec.background_level + wave + grain + tint, 0.0, 255.0));
      }
    }
  }

  const int count = rng.uniform_int(spec.min_blobs, spec.max_blobs);
  s.ground_truth = BinaryMask(n, n);
  for (int b = 0; b < count; ++b) {
    Ellipse e;
    e.rx = rng.uniform(spec.min_radius, spec.max_radius);
    e.ry = rng.uniform(spec.min_radius, spec.max_radius);
    e.cx = rng.uniform(e.rx, n - 1 - e.rx);
    e.cy = rng.uniform(e.ry, n - 1 - e.ry);
    // Bright, saturated-ish colour with a smooth radial shading.
    std::array<double, 3> color;
    for (auto& ch : color) ch = rng.uniform(170.0, 250.0);
    color[rng.uniform_int(0, 2)] = rng.uniform(200.0, 255.0);
    const BinaryMask blob = rasterize_ellipse(e, n, n);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (!blob(y, x)) continue;
        const double dx = (x - e.cx) / e.rx;
        const double dy = (y - e.cy) / e.ry;
        const double shade = 1.0 - 0.08 * (dx * dx + dy * dy);
        for (int c = 0; c < 3; ++c) {
          s.raw(y, x, c) = static_cast<float>(std::clamp(color[c] * shade, 0.0, 255.0));
        }
        s.ground_truth.set(y, x, true);
      }
    }
    s.blobs.push_back(e);
    s.boxes.push_back(mask_to_box(blob));
  }
  return s;
}

ScribbleMask make_irregular_mask(int height, int width, double target_zero_fraction,
                                 std::uint64_t seed) {
  if (!(target_zero_fraction >= 0.0 && target_zero_fraction < 1.0)) {
    throw InvalidArgument("target zero fraction must lie in [0,1)");
  }
  RandomStream rng(seed);
  Plane<std::uint8_t> keep(height, width, 1);
  const double scale = std::min(height, width);
  int guard = 0;
  while (hidden_fraction(keep) < target_zero_fraction && guard++ < 10000) {
    if (rng.bernoulli(0.7)) {
      // Streak: a random walk of discs.
      double x = rng.uniform(0.0, width);
      double y = rng.uniform(0.0, height);
      double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double r = rng.uniform(0.02, 0.06) * scale;
      const int segments = rng.uniform_int(2, 6);
      for (int s = 0; s < segments; ++s) {
        angle += rng.uniform(-1.2, 1.2);
        const double len = rng.uniform(0.1, 0.35) * scale;
        const int steps = std::max(1, static_cast<int>(len / std::max(r * 0.5, 0.5)));
        for (int k = 0; k < steps; ++k) {
          x += std::cos(angle) * len / steps;
          y += std::sin(angle) * len / steps;
          stamp_disc(keep, x, y, r);
        }
      }
    } else {
      stamp_disc(keep, rng.uniform(0.0, width), rng.uniform(0.0, height),
                 rng.uniform(0.05, 0.15) * scale);
    }
  }
  return ScribbleMask(std::move(keep));
}

DatasetManifest generate_synthetic_dataset(const SyntheticSpec& spec,
                                           const std::filesystem::path& out_dir) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "ground_truth");
  DatasetManifest manifest;
  for (int i = 0; i < spec.image_count; ++i) {
    SyntheticSample s = make_synthetic_sample(spec, i);
    DatasetEntry e;
    e.image_id = s.image_id;
    e.image_path = out_dir / "images" / (s.image_id + ".png");
    e.ground_truth_mask_path = out_dir / "ground_truth" / (s.image_id + ".png");
    e.ground_truth_boxes = s.boxes;
    write_rgb_png(e.image_path, s.raw);
    write_mask_png(*e.ground_truth_mask_path, s.ground_truth);
    manifest.entries.push_back(std::move(e));
  }
  if (spec.mask_count > 0) {
    fs::create_directories(out_dir / "masks");
    for (int i = 0; i < spec.mask_count; ++i) {
      // Hidden fractions spread over [0.1, 0.9] so both bank modes are populated.
      const double target = 0.1 + 0.8 * (i + 0.5) / spec.mask_count;
      const ScribbleMask m = make_irregular_mask(spec.image_size, spec.image_size, target,
                                                 derive_seed(spec.seed, {kMaskKey, std::uint64_t(i)}));
      write_mask_png(out_dir / "masks" / fmt::format("mask_{:04d}.png", i), m);
    }
  }
  manifest.metadata = {
      {"generator", "synthetic_blobs"},
      {"spec",
       {{"image_count", spec.image_count},
        {"image_size", spec.image_size},
        {"min_blobs", spec.min_blobs},
        {"max_blobs", spec.max_blobs},
        {"min_radius", spec.min_radius},
        {"max_radius", spec.max_radius},
        {"texture_amplitude", spec.texture_amplitude},
        {"background_level", spec.background_level},
        {"seed", spec.seed},
        {"mask_count", spec.mask_count}}},
  };
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace peekaboo
