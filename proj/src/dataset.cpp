// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/dataset.hpp"

#include <fstream>

namespace peekaboo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

// In-memory relative paths are relative to the working directory.
std::string relativize(const fs::path& base, const fs::path& p) {
  const fs::path abs = fs::absolute(p).lexically_normal();
  const fs::path rel = abs.lexically_relative(base);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return abs.generic_string();
}

BoundingBox parse_box(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw InvalidArgument("ground-truth box must be [x_min, y_min, x_max, y_max]");
  }
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

}  // namespace

DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  const fs::path base = fs::absolute(path).lexically_normal().parent_path();

  DatasetManifest out;
  if (doc.contains("metadata")) out.metadata = doc["metadata"];
  try {
    for (const auto& item : doc.at("images")) {
      DatasetEntry e;
      e.image_id = item.at("image_id").get<std::string>();
      e.image_path = resolve(base, item.at("image_path").get<std::string>());
      if (item.contains("unmasked_feature_path") && !item["unmasked_feature_path"].is_null()) {
        e.unmasked_feature_path = resolve(base, item["unmasked_feature_path"].get<std::string>());
      }
      if (item.contains("masked_variants")) {
        for (const auto& v : item["masked_variants"]) {
          e.masked_variants.push_back({v.at("mask_id").get<std::string>(),
                                       resolve(base, v.at("feature_path").get<std::string>())});
        }
      }
      if (item.contains("ground_truth_mask_path") && !item["ground_truth_mask_path"].is_null()) {
        e.ground_truth_mask_path = resolve(base, item["ground_truth_mask_path"].get<std::string>());
      }
      if (item.contains("ground_truth_boxes")) {
        for (const auto& b : item["ground_truth_boxes"]) e.ground_truth_boxes.push_back(parse_box(b));
      }
      out.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
  return out;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  const fs::path base = fs::absolute(path).lexically_normal().parent_path();
  json images = json::array();
  for (const auto& e : manifest.entries) {
    json item;
    item["image_id"] = e.image_id;
    item["image_path"] = relativize(base, e.image_path);
    if (e.unmasked_feature_path) {
      item["unmasked_feature_path"] = relativize(base, *e.unmasked_feature_path);
    }
    json variants = json::array();
    for (const auto& v : e.masked_variants) {
      variants.push_back({{"mask_id", v.mask_id}, {"feature_path", relativize(base, v.feature_path)}});
    }
    item["masked_variants"] = std::move(variants);
    if (e.ground_truth_mask_path) {
      item["ground_truth_mask_path"] = relativize(base, *e.ground_truth_mask_path);
    }
    json boxes = json::array();
    for (const auto& b : e.ground_truth_boxes) boxes.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
    item["ground_truth_boxes"] = std::move(boxes);
    images.push_back(std::move(item));
  }
  json doc{{"metadata", manifest.metadata}, {"images", std::move(images)}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace peekaboo
