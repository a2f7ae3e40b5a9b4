// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "peekaboo/image.hpp"

namespace peekaboo {

/// Which side of the 50% zero-pixel split a bank keeps.
enum class MaskMode {
  kHigh,  // zero_fraction > 0.5
  kLow,   // zero_fraction <= 0.5
};

MaskMode parse_mask_mode(std::string_view text);
std::string_view to_string(MaskMode mode);
bool passes_filter(double zero_fraction, MaskMode mode);

struct MaskRecord {
  std::string id;
  ScribbleMask mask;
  double zero_fraction = 0.0;
};

/// Immutable, filtered, id-ordered collection of occlusion masks.
class MaskBank {
 public:
  /// Keeps the candidates that pass the mode filter, ordered by id. Throws
  /// InvalidArgument when nothing survives.
  MaskBank(std::vector<MaskRecord> candidates, MaskMode mode, std::uint64_t seed);

  const std::vector<MaskRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  MaskMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<MaskRecord> records_;
  MaskMode mode_;
  std::uint64_t seed_;
};

/// pixel -> 1 if gray >= threshold * 255, else 0.
ScribbleMask binarize_raw_mask(const Plane<float>& gray, double threshold = 0.5);

/// Loads every PNG/JPEG under mask_dir, resizes it (nearest) to the working
/// resolution, binarizes it, and filters by mode.
MaskBank build_bank(const std::filesystem::path& mask_dir, MaskMode mode, std::uint64_t seed,
                    int working_height = kWorkingSize, int working_width = kWorkingSize);

/// Uniform draw addressed by (bank seed, draw_index). The same index always
/// yields the same record, so draws can be distributed across workers freely.
const MaskRecord& sample_mask(const MaskBank& bank, std::uint64_t draw_index);

}  // namespace peekaboo
