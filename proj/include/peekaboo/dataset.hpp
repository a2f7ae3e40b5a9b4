// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "peekaboo/image.hpp"

namespace peekaboo {

struct MaskedVariantEntry {
  std::string mask_id;
  std::filesystem::path feature_path;
};

/// One image of a dataset manifest. Paths are absolute after read_manifest.
struct DatasetEntry {
  std::string image_id;
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> unmasked_feature_path;
  std::vector<MaskedVariantEntry> masked_variants;
  std::optional<std::filesystem::path> ground_truth_mask_path;
  std::vector<BoundingBox> ground_truth_boxes;
};

struct DatasetManifest {
  std::vector<DatasetEntry> entries;
  /// Free-form producer metadata (feature source selector, generator spec, ...).
  nlohmann::json metadata = nlohmann::json::object();
};

/// Parses a manifest; relative paths are resolved against the manifest's directory.
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Writes a manifest; paths under the manifest's directory are stored relative.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace peekaboo
