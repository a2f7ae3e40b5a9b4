// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/image.hpp"

#include <numeric>

namespace peekaboo {

namespace {

void check_image_dims(int height, int width) {
  if (height < ImageTensor::kMinSide || width < ImageTensor::kMinSide) {
    throw InvalidArgument("image must be at least 8x8, got " + std::to_string(height) + "x" +
                          std::to_string(width));
  }
}

void check_binary(const Plane<std::uint8_t>& values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values.data()[i] > 1) {
      throw InvalidArgument(std::string(what) + " value " + std::to_string(values.data()[i]) +
                            " is not in {0,1} at index " + std::to_string(i));
    }
  }
}

template <typename Mask>
Plane<std::uint8_t> nearest_plane(const Mask& mask, int out_h, int out_w) {
  detail::check_target(out_h, out_w);
  Plane<std::uint8_t> out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    const int sy = detail::nearest_index(y, mask.height(), out_h);
    for (int x = 0; x < out_w; ++x) {
      out(y, x) = mask(sy, detail::nearest_index(x, mask.width(), out_w));
    }
  }
  return out;
}

}  // namespace

ImageTensor::ImageTensor(int height, int width, float fill) : height_(height), width_(width) {
  check_image_dims(height, width);
  if (!std::isfinite(fill)) throw InvalidArgument("image fill value must be finite");
  data_.assign(pixel_count() * kChannels, fill);
}

ImageTensor::ImageTensor(int height, int width, std::vector<float> data)
    : height_(height), width_(width), data_(std::move(data)) {
  check_image_dims(height, width);
  if (data_.size() != pixel_count() * kChannels) {
    throw ShapeError("image data length " + std::to_string(data_.size()) + " does not match " +
                     std::to_string(height) + "x" + std::to_string(width) + "x3");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw InvalidArgument("image value at index " + std::to_string(i) + " is not finite");
    }
  }
}

BinaryMask::BinaryMask(int height, int width, std::uint8_t fill)
    : values_(height, width, fill) {
  check_binary(values_, "binary mask");
}

BinaryMask::BinaryMask(Plane<std::uint8_t> values) : values_(std::move(values)) {
  check_binary(values_, "binary mask");
}

std::size_t BinaryMask::count_ones() const {
  return static_cast<std::size_t>(std::count(data().begin(), data().end(), std::uint8_t{1}));
}

ScribbleMask::ScribbleMask(Plane<std::uint8_t> values) : values_(std::move(values)) {
  check_binary(values_, "scribble mask");
  const auto zeros = std::count(values_.data().begin(), values_.data().end(), std::uint8_t{0});
  zero_fraction_ = static_cast<double>(zeros) / static_cast<double>(values_.size());
}

ScribbleMask::ScribbleMask(int height, int width, std::uint8_t fill)
    : ScribbleMask(Plane<std::uint8_t>(height, width, fill)) {}

ImageTensor apply_mask(const ImageTensor& image, const ScribbleMask& mask) {
  if (image.height() != mask.height() || image.width() != mask.width()) {
    throw ShapeError("apply_mask: image is " + std::to_string(image.height()) + "x" +
                     std::to_string(image.width()) + " but mask is " +
                     std::to_string(mask.height()) + "x" + std::to_string(mask.width()));
  }
  ImageTensor out = image;
  auto px = out.data();
  const auto m = mask.data();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const float keep = m[i];
    for (int c = 0; c < ImageTensor::kChannels; ++c) px[i * ImageTensor::kChannels + c] *= keep;
  }
  return out;
}

ImageTensor normalize_image(const ImageTensor& raw, const ChannelStats& stats) {
  for (float s : stats.std) {
    if (!(s > 0.0f)) throw InvalidArgument("normalize_image: std components must be > 0");
  }
  ImageTensor out = raw;
  auto px = out.data();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const int c = static_cast<int>(i % ImageTensor::kChannels);
    px[i] = (px[i] / 255.0f - stats.mean[c]) / stats.std[c];
  }
  return out;
}

ImageTensor denormalize_image(const ImageTensor& normalized, const ChannelStats& stats) {
  ImageTensor out = normalized;
  auto px = out.data();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const int c = static_cast<int>(i % ImageTensor::kChannels);
    px[i] = (px[i] * stats.std[c] + stats.mean[c]) * 255.0f;
  }
  return out;
}

ImageTensor resize_bilinear(const ImageTensor& image, int out_h, int out_w) {
  detail::check_target(out_h, out_w);
  if (image.height() == out_h && image.width() == out_w) return image;
  ImageTensor out(out_h, out_w);
  std::vector<detail::Tap> xs(out_w);
  for (int x = 0; x < out_w; ++x) xs[x] = detail::bilinear_tap(x, image.width(), out_w);
  for (int y = 0; y < out_h; ++y) {
    const auto ty = detail::bilinear_tap(y, image.height(), out_h);
    for (int x = 0; x < out_w; ++x) {
      const auto& tx = xs[x];
      for (int c = 0; c < ImageTensor::kChannels; ++c) {
        const double top =
            (1.0 - tx.frac) * image(ty.lo, tx.lo, c) + tx.frac * image(ty.lo, tx.hi, c);
        const double bottom =
            (1.0 - tx.frac) * image(ty.hi, tx.lo, c) + tx.frac * image(ty.hi, tx.hi, c);
        out(y, x, c) = static_cast<float>((1.0 - ty.frac) * top + ty.frac * bottom);
      }
    }
  }
  return out;
}

BinaryMask resize_nearest(const BinaryMask& mask, int out_h, int out_w) {
  return BinaryMask(nearest_plane(mask, out_h, out_w));
}

ScribbleMask resize_nearest(const ScribbleMask& mask, int out_h, int out_w) {
  return ScribbleMask(nearest_plane(mask, out_h, out_w));
}

Plane<float> resize_nearest(const Plane<float>& plane, int out_h, int out_w) {
  detail::check_target(out_h, out_w);
  Plane<float> out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    const int sy = detail::nearest_index(y, plane.height(), out_h);
    for (int x = 0; x < out_w; ++x) {
      out(y, x) = plane(sy, detail::nearest_index(x, plane.width(), out_w));
    }
  }
  return out;
}

}  // namespace peekaboo
