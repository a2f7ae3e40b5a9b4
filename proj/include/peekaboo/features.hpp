// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "peekaboo/errors.hpp"

namespace peekaboo {

/// grid_h × grid_w patch features of dimension dim, row-major (i, j, d).
class FeatureGrid {
 public:
  FeatureGrid() = default;
  FeatureGrid(int grid_h, int grid_w, int dim);
  FeatureGrid(int grid_h, int grid_w, int dim, std::vector<float> data);

  int grid_h() const { return grid_h_; }
  int grid_w() const { return grid_w_; }
  int dim() const { return dim_; }
  std::size_t patch_count() const { return static_cast<std::size_t>(grid_h_) * grid_w_; }

  std::span<float> patch(int i, int j) {
    return {data_.data() + (static_cast<std::size_t>(i) * grid_w_ + j) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<const float> patch(int i, int j) const {
    return {data_.data() + (static_cast<std::size_t>(i) * grid_w_ + j) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;

 private:
  int grid_h_ = 0;
  int grid_w_ = 0;
  int dim_ = 0;
  std::vector<float> data_;
};

/// Which Siamese branch input a feature grid was computed from.
struct FeatureVariant {
  bool masked = false;
  std::string mask_id;

  static FeatureVariant unmasked() { return {}; }
  static FeatureVariant with_mask(std::string id) { return {true, std::move(id)}; }
  std::string key() const { return masked ? "masked:" + mask_id : "unmasked"; }
  friend bool operator==(const FeatureVariant&, const FeatureVariant&) = default;
};

struct FeatureRecord {
  std::string image_id;
  FeatureVariant variant;
  FeatureGrid features;
};

// PKBF layout (all integers little-endian):
//   "PKBF" | u32 version=1 | u32 grid_h | u32 grid_w | u32 dim | u32 dtype (0 = f32 LE)
//   | u16 len + image_id | u16 variant (0 unmasked, 1 masked) [| u16 len + mask_id]
//   | grid_h*grid_w*dim f32, row-major
inline constexpr std::uint32_t kPkbfVersion = 1;

class PkbfError : public Error {
 public:
  enum class Kind { kBadMagic, kUnsupportedVersion, kUnsupportedDtype, kTruncated, kMalformed };
  PkbfError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<std::uint8_t> encode_pkbf(const FeatureRecord& record);
FeatureRecord decode_pkbf(std::span<const std::uint8_t> bytes);

/// Writes via a temporary file and rename so readers never see partial files.
void write_feature_file(const FeatureRecord& record, const std::filesystem::path& path);
FeatureRecord read_feature_file(const std::filesystem::path& path);

}  // namespace peekaboo
