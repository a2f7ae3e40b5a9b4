// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// Frozen feature extraction. Backends never hold learnable state: encode() is
// a pure function of its request.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "peekaboo/dataset.hpp"
#include "peekaboo/features.hpp"
#include "peekaboo/image.hpp"

namespace peekaboo {

/// A request names the image (for replay lookups) and carries its pixels (for
/// backends that compute features).
struct EncodeRequest {
  const ImageTensor* image = nullptr;
  std::string image_id;
  FeatureVariant variant;
};

class FeatureNotFound : public Error {
 public:
  FeatureNotFound(std::string image_id, FeatureVariant variant);
  const std::string& image_id() const { return image_id_; }
  const FeatureVariant& variant() const { return variant_; }

 private:
  std::string image_id_;
  FeatureVariant variant_;
};

class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;
  virtual std::string_view kind() const = 0;
  virtual int dim() const = 0;
  virtual FeatureGrid encode(const EncodeRequest& request) const = 0;
  /// Digest of all backend state, for frozen-ness checks.
  virtual std::uint64_t state_hash() const = 0;
};

/// Desk-scale stand-in for a pretrained encoder: each patch's pixel vector is
/// sent through a fixed seed-derived random linear projection, then
/// L2-normalized. All-zero patches map to the zero vector.
class ToyEncoder final : public EncoderBackend {
 public:
  static constexpr int kDefaultPatch = 8;
  static constexpr int kDefaultDim = 384;

  explicit ToyEncoder(int patch = kDefaultPatch, int dim = kDefaultDim, std::uint64_t seed = 0);

  std::string_view kind() const override { return "toy"; }
  int dim() const override { return dim_; }
  int patch() const { return patch_; }
  std::uint64_t seed() const { return seed_; }

  FeatureGrid encode(const EncodeRequest& request) const override;
  FeatureGrid encode(const ImageTensor& image) const;
  /// Projection without the per-patch normalization.
  FeatureGrid project(const ImageTensor& image) const;
  std::uint64_t state_hash() const override;

 private:
  int patch_;
  int dim_;
  std::uint64_t seed_;
  std::vector<float> projection_;  // (3 * patch^2) × dim, row-major
};

FeatureGrid toy_encode(const ImageTensor& image, int patch, int dim, std::uint64_t seed);

/// Serves precomputed features keyed by (image_id, variant). Entries are either
/// held in memory or read from PKBF files on demand.
class ReplayEncoder final : public EncoderBackend {
 public:
  explicit ReplayEncoder(int dim) : dim_(dim) {}

  /// Indexes every feature path listed in a manifest. Fails if a listed file's
  /// header disagrees with dim.
  static ReplayEncoder from_manifest(const DatasetManifest& manifest, int dim);

  void add(FeatureRecord record);
  void add_path(std::string image_id, FeatureVariant variant, std::filesystem::path path);

  std::string_view kind() const override { return "replay"; }
  int dim() const override { return dim_; }
  FeatureGrid encode(const EncodeRequest& request) const override;
  std::uint64_t state_hash() const override;

  /// Masked variants available for an image, in insertion order.
  const std::vector<std::string>& mask_ids(const std::string& image_id) const;

 private:
  using Key = std::pair<std::string, std::string>;  // (image_id, variant key)
  int dim_;
  std::map<Key, FeatureGrid> memory_;
  std::map<Key, std::filesystem::path> files_;
  std::map<std::string, std::vector<std::string>> mask_ids_;
};

}  // namespace peekaboo
