// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace peekaboo {

namespace {

constexpr char kMagic[4] = {'P', 'K', 'B', 'F'};
constexpr std::uint32_t kDtypeF32 = 0;

static_assert(std::endian::native == std::endian::little,
              "PKBF encoding assumes a little-endian host");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u16(std::uint16_t v) { bytes(&v, sizeof v); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void str(const std::string& s) {
    if (s.size() > 0xffff) throw InvalidArgument("PKBF string longer than 65535 bytes");
    u16(static_cast<std::uint16_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  void bytes(void* p, std::size_t n, const char* what) {
    if (in_.size() - pos_ < n) {
      throw PkbfError(PkbfError::Kind::kTruncated,
                      std::string("PKBF truncated while reading ") + what);
    }
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint16_t u16(const char* what) {
    std::uint16_t v;
    bytes(&v, sizeof v, what);
    return v;
  }
  std::uint32_t u32(const char* what) {
    std::uint32_t v;
    bytes(&v, sizeof v, what);
    return v;
  }
  std::string str(const char* what) {
    std::string s(u16(what), '\0');
    bytes(s.data(), s.size(), what);
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

FeatureGrid::FeatureGrid(int grid_h, int grid_w, int dim)
    : FeatureGrid(grid_h, grid_w, dim,
                  std::vector<float>(static_cast<std::size_t>(std::max(grid_h, 0)) *
                                     std::max(grid_w, 0) * std::max(dim, 0))) {}

FeatureGrid::FeatureGrid(int grid_h, int grid_w, int dim, std::vector<float> data)
    : grid_h_(grid_h), grid_w_(grid_w), dim_(dim), data_(std::move(data)) {
  if (grid_h < 1 || grid_w < 1 || dim < 1) {
    throw InvalidArgument("feature grid dimensions must be positive");
  }
  if (data_.size() != patch_count() * dim_) {
    throw ShapeError("feature data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(grid_h) + "x" + std::to_string(grid_w) + "x" +
                     std::to_string(dim));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw InvalidArgument("feature value at index " + std::to_string(i) + " is not finite");
    }
  }
}

std::vector<std::uint8_t> encode_pkbf(const FeatureRecord& record) {
  const FeatureGrid& f = record.features;
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kPkbfVersion);
  w.u32(static_cast<std::uint32_t>(f.grid_h()));
  w.u32(static_cast<std::uint32_t>(f.grid_w()));
  w.u32(static_cast<std::uint32_t>(f.dim()));
  w.u32(kDtypeF32);
  w.str(record.image_id);
  w.u16(record.variant.masked ? 1 : 0);
  if (record.variant.masked) w.str(record.variant.mask_id);
  w.bytes(f.data().data(), f.data().size_bytes());
  return w.take();
}

FeatureRecord decode_pkbf(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[4];
  r.bytes(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw PkbfError(PkbfError::Kind::kBadMagic, "not a PKBF file (bad magic)");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kPkbfVersion) {
    throw PkbfError(PkbfError::Kind::kUnsupportedVersion,
                    "unsupported PKBF version " + std::to_string(version));
  }
  const std::uint32_t grid_h = r.u32("grid_h");
  const std::uint32_t grid_w = r.u32("grid_w");
  const std::uint32_t dim = r.u32("dim");
  const std::uint32_t dtype = r.u32("dtype");
  if (dtype != kDtypeF32) {
    throw PkbfError(PkbfError::Kind::kUnsupportedDtype,
                    "unsupported PKBF dtype code " + std::to_string(dtype));
  }
  if (grid_h == 0 || grid_w == 0 || dim == 0 || grid_h > 1u << 16 || grid_w > 1u << 16 ||
      dim > 1u << 20) {
    throw PkbfError(PkbfError::Kind::kMalformed, "PKBF header has invalid grid shape");
  }

  FeatureRecord rec;
  rec.image_id = r.str("image_id");
  const std::uint16_t tag = r.u16("variant tag");
  if (tag > 1) {
    throw PkbfError(PkbfError::Kind::kMalformed, "unknown PKBF variant tag " + std::to_string(tag));
  }
  if (tag == 1) rec.variant = FeatureVariant::with_mask(r.str("mask_id"));

  const std::size_t count = static_cast<std::size_t>(grid_h) * grid_w * dim;
  if (r.remaining() < count * sizeof(float)) {
    throw PkbfError(PkbfError::Kind::kTruncated,
                    "PKBF payload truncated: expected " + std::to_string(count * sizeof(float)) +
                        " bytes, found " + std::to_string(r.remaining()));
  }
  std::vector<float> data(count);
  r.bytes(data.data(), count * sizeof(float), "payload");
  if (r.remaining() != 0) {
    throw PkbfError(PkbfError::Kind::kMalformed, "PKBF file has trailing bytes");
  }
  try {
    rec.features = FeatureGrid(static_cast<int>(grid_h), static_cast<int>(grid_w),
                               static_cast<int>(dim), std::move(data));
  } catch (const InvalidArgument& e) {
    throw PkbfError(PkbfError::Kind::kMalformed, e.what());
  }
  return rec;
}

void write_feature_file(const FeatureRecord& record, const std::filesystem::path& path) {
  const auto bytes = encode_pkbf(record);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

FeatureRecord read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_pkbf(bytes);
}

}  // namespace peekaboo
