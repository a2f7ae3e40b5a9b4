// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/encoder.hpp"

#include <cmath>

#include "peekaboo/random.hpp"

namespace peekaboo {

FeatureNotFound::FeatureNotFound(std::string image_id, FeatureVariant variant)
    : Error("feature record not found: (" + image_id + ", " + variant.key() + ")"),
      image_id_(std::move(image_id)),
      variant_(std::move(variant)) {}

ToyEncoder::ToyEncoder(int patch, int dim, std::uint64_t seed)
    : patch_(patch), dim_(dim), seed_(seed) {
  if (patch < 1 || dim < 1) throw InvalidArgument("toy encoder patch and dim must be positive");
  const int in_dim = 3 * patch * patch;
  projection_.resize(static_cast<std::size_t>(in_dim) * dim);
  RandomStream rng(seed, {0x746f79ULL});
  const double scale = 1.0 / std::sqrt(static_cast<double>(in_dim));
  for (auto& w : projection_) w = static_cast<float>(rng.normal() * scale);
}

FeatureGrid ToyEncoder::project(const ImageTensor& image) const {
  if (image.height() % patch_ != 0 || image.width() % patch_ != 0) {
    throw InvalidArgument("image " + std::to_string(image.height()) + "x" +
                          std::to_string(image.width()) + " is not divisible by patch size " +
                          std::to_string(patch_));
  }
  const int gh = image.height() / patch_;
  const int gw = image.width() / patch_;
  FeatureGrid out(gh, gw, dim_);
  std::vector<double> acc(dim_);
  for (int i = 0; i < gh; ++i) {
    for (int j = 0; j < gw; ++j) {
      std::fill(acc.begin(), acc.end(), 0.0);
      int row = 0;
      for (int py = 0; py < patch_; ++py) {
        for (int px = 0; px < patch_; ++px) {
          for (int c = 0; c < ImageTensor::kChannels; ++c, ++row) {
            const double v = image(i * patch_ + py, j * patch_ + px, c);
            if (v == 0.0) continue;
            const float* w = projection_.data() + static_cast<std::size_t>(row) * dim_;
            for (int d = 0; d < dim_; ++d) acc[d] += v * w[d];
          }
        }
      }
      auto dst = out.patch(i, j);
      for (int d = 0; d < dim_; ++d) dst[d] = static_cast<float>(acc[d]);
    }
  }
  return out;
}

FeatureGrid ToyEncoder::encode(const ImageTensor& image) const {
  FeatureGrid out = project(image);
  for (int i = 0; i < out.grid_h(); ++i) {
    for (int j = 0; j < out.grid_w(); ++j) {
      auto f = out.patch(i, j);
      double sq = 0.0;
      for (float v : f) sq += static_cast<double>(v) * v;
      if (sq == 0.0) continue;
      const double inv = 1.0 / std::sqrt(sq);
      for (float& v : f) v = static_cast<float>(v * inv);
    }
  }
  return out;
}

FeatureGrid ToyEncoder::encode(const EncodeRequest& request) const {
  if (request.image == nullptr) throw InvalidArgument("toy encoder needs image pixels");
  return encode(*request.image);
}

std::uint64_t ToyEncoder::state_hash() const {
  std::uint64_t h = fnv1a(projection_.data(), projection_.size() * sizeof(float));
  const int header[2] = {patch_, dim_};
  return fnv1a(header, sizeof header, h);
}

FeatureGrid toy_encode(const ImageTensor& image, int patch, int dim, std::uint64_t seed) {
  return ToyEncoder(patch, dim, seed).encode(image);
}

ReplayEncoder ReplayEncoder::from_manifest(const DatasetManifest& manifest, int dim) {
  ReplayEncoder enc(dim);
  for (const auto& e : manifest.entries) {
    if (e.unmasked_feature_path) {
      enc.add_path(e.image_id, FeatureVariant::unmasked(), *e.unmasked_feature_path);
    }
    for (const auto& v : e.masked_variants) {
      enc.add_path(e.image_id, FeatureVariant::with_mask(v.mask_id), v.feature_path);
    }
  }
  return enc;
}

void ReplayEncoder::add(FeatureRecord record) {
  if (record.features.dim() != dim_) {
    throw ShapeError("replay record dim " + std::to_string(record.features.dim()) +
                     " does not match backend dim " + std::to_string(dim_));
  }
  Key key{record.image_id, record.variant.key()};
  if (memory_.contains(key) || files_.contains(key)) {
    throw InvalidArgument("duplicate replay record (" + key.first + ", " + key.second + ")");
  }
  if (record.variant.masked) mask_ids_[record.image_id].push_back(record.variant.mask_id);
  memory_.emplace(std::move(key), std::move(record.features));
}

void ReplayEncoder::add_path(std::string image_id, FeatureVariant variant,
                             std::filesystem::path path) {
  Key key{image_id, variant.key()};
  if (memory_.contains(key) || files_.contains(key)) {
    throw InvalidArgument("duplicate replay record (" + key.first + ", " + key.second + ")");
  }
  if (variant.masked) mask_ids_[image_id].push_back(variant.mask_id);
  files_.emplace(std::move(key), std::move(path));
}

FeatureGrid ReplayEncoder::encode(const EncodeRequest& request) const {
  const Key key{request.image_id, request.variant.key()};
  if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  auto it = files_.find(key);
  if (it == files_.end()) throw FeatureNotFound(request.image_id, request.variant);
  FeatureRecord rec = read_feature_file(it->second);
  if (rec.image_id != request.image_id || !(rec.variant == request.variant)) {
    throw FeatureNotFound(request.image_id, request.variant);
  }
  if (rec.features.dim() != dim_) {
    throw ShapeError("feature file " + it->second.string() + " has dim " +
                     std::to_string(rec.features.dim()) + ", expected " + std::to_string(dim_));
  }
  return std::move(rec.features);
}

std::uint64_t ReplayEncoder::state_hash() const {
  std::uint64_t h = fnv1a(&dim_, sizeof dim_);
  for (const auto& [key, grid] : memory_) {
    h = fnv1a(key.first.data(), key.first.size(), h);
    h = fnv1a(key.second.data(), key.second.size(), h);
    h = fnv1a(grid.data().data(), grid.data().size_bytes(), h);
  }
  for (const auto& [key, path] : files_) {
    h = fnv1a(key.first.data(), key.first.size(), h);
    const std::string p = path.string();
    h = fnv1a(p.data(), p.size(), h);
  }
  return h;
}

const std::vector<std::string>& ReplayEncoder::mask_ids(const std::string& image_id) const {
  static const std::vector<std::string> kNone;
  auto it = mask_ids_.find(image_id);
  return it == mask_ids_.end() ? kNone : it->second;
}

}  // namespace peekaboo
