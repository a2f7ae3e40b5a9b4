// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/mask_bank.hpp"

#include <algorithm>

#include "peekaboo/image_io.hpp"
#include "peekaboo/random.hpp"

namespace peekaboo {

MaskMode parse_mask_mode(std::string_view text) {
  if (text == "high") return MaskMode::kHigh;
  if (text == "low") return MaskMode::kLow;
  throw InvalidArgument("mask mode must be 'high' or 'low', got '" + std::string(text) + "'");
}

std::string_view to_string(MaskMode mode) { return mode == MaskMode::kHigh ? "high" : "low"; }

bool passes_filter(double zero_fraction, MaskMode mode) {
  return mode == MaskMode::kHigh ? zero_fraction > 0.5 : zero_fraction <= 0.5;
}

MaskBank::MaskBank(std::vector<MaskRecord> candidates, MaskMode mode, std::uint64_t seed)
    : mode_(mode), seed_(seed) {
  for (auto& rec : candidates) {
    if (passes_filter(rec.zero_fraction, mode)) records_.push_back(std::move(rec));
  }
  if (records_.empty()) {
    throw InvalidArgument("no masks satisfy filter (mode=" + std::string(to_string(mode)) + ")");
  }
  std::sort(records_.begin(), records_.end(),
            [](const MaskRecord& a, const MaskRecord& b) { return a.id < b.id; });
}

ScribbleMask binarize_raw_mask(const Plane<float>& gray, double threshold) {
  const double cut = threshold * 255.0;
  Plane<std::uint8_t> bits(gray.height(), gray.width());
  std::transform(gray.data().begin(), gray.data().end(), bits.data().begin(),
                 [cut](float v) { return static_cast<std::uint8_t>(v >= cut ? 1 : 0); });
  return ScribbleMask(std::move(bits));
}

MaskBank build_bank(const std::filesystem::path& mask_dir, MaskMode mode, std::uint64_t seed,
                    int working_height, int working_width) {
  if (!std::filesystem::is_directory(mask_dir)) {
    throw IoError("mask directory not found: " + mask_dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(mask_dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) files.push_back(entry.path());
  }
  if (files.empty()) throw IoError("no mask images found in " + mask_dir.string());
  std::sort(files.begin(), files.end());

  std::vector<MaskRecord> candidates;
  candidates.reserve(files.size());
  for (const auto& file : files) {
    const Plane<float> gray =
        resize_nearest(read_gray_image(file), working_height, working_width);
    ScribbleMask mask = binarize_raw_mask(gray);
    const double zf = mask.zero_fraction();
    candidates.push_back({file.filename().string(), std::move(mask), zf});
  }
  return MaskBank(std::move(candidates), mode, seed);
}

const MaskRecord& sample_mask(const MaskBank& bank, std::uint64_t draw_index) {
  RandomStream rng(bank.seed(), {0x6d61736bULL, draw_index});
  return bank.records()[rng.below(bank.size())];
}

}  // namespace peekaboo
