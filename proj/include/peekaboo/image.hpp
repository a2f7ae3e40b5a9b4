// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// Dense grid value types shared by every stage of the pipeline, plus the
// elementwise and resampling primitives that operate on them.
//
// Layout is row-major everywhere: Plane(y, x) lives at data[y * width + x] and
// ImageTensor(y, x, c) at data[(y * width + x) * 3 + c].

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "peekaboo/errors.hpp"

namespace peekaboo {

/// Working resolution used for training images and masks.
inline constexpr int kWorkingSize = 224;

/// Single-channel H×W grid.
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;
  Plane(int height, int width, T fill = T{}) : height_(height), width_(width) {
    if (height < 1 || width < 1) {
      throw InvalidArgument("plane dimensions must be positive, got " + std::to_string(height) +
                            "x" + std::to_string(width));
    }
    data_.assign(static_cast<std::size_t>(height) * width, fill);
  }
  Plane(int height, int width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (height < 1 || width < 1) {
      throw InvalidArgument("plane dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(height) * width) {
      throw ShapeError("plane data length " + std::to_string(data_.size()) + " does not match " +
                       std::to_string(height) + "x" + std::to_string(width));
    }
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const T& operator()(int y, int x) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  bool same_shape(const Plane& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }
  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

/// H×W×3 real-valued image. Raw images hold 0..255 values; normalized images
/// hold (raw/255 - mean)/std per channel.
class ImageTensor {
 public:
  static constexpr int kChannels = 3;
  static constexpr int kMinSide = 8;

  ImageTensor() = default;
  ImageTensor(int height, int width, float fill = 0.0f);
  ImageTensor(int height, int width, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }
  bool empty() const { return data_.empty(); }

  float& operator()(int y, int x, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  float operator()(int y, int x, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

/// Per-pixel foreground probability in [0,1].
template <typename Real>
class BasicSoftMask {
 public:
  BasicSoftMask() = default;
  explicit BasicSoftMask(Plane<Real> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const Real v = values_.data()[i];
      if (!std::isfinite(static_cast<double>(v)) || v < Real(0) || v > Real(1)) {
        throw InvalidArgument("soft mask value out of [0,1] at index " + std::to_string(i));
      }
    }
  }
  BasicSoftMask(int height, int width, Real fill) : BasicSoftMask(Plane<Real>(height, width, fill)) {}

  int height() const { return values_.height(); }
  int width() const { return values_.width(); }
  std::size_t size() const { return values_.size(); }
  Real operator()(int y, int x) const { return values_(y, x); }
  std::span<const Real> data() const { return values_.data(); }
  const Plane<Real>& plane() const { return values_; }

  friend bool operator==(const BasicSoftMask&, const BasicSoftMask&) = default;

 private:
  Plane<Real> values_;
};

using SoftMask = BasicSoftMask<float>;

/// {0,1}-valued mask; 1 marks foreground.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, std::uint8_t fill = 0);
  explicit BinaryMask(Plane<std::uint8_t> values);

  int height() const { return values_.height(); }
  int width() const { return values_.width(); }
  std::size_t size() const { return values_.size(); }
  std::uint8_t operator()(int y, int x) const { return values_(y, x); }
  void set(int y, int x, bool on) { values_(y, x) = on ? 1 : 0; }
  std::span<const std::uint8_t> data() const { return values_.data(); }
  const Plane<std::uint8_t>& plane() const { return values_; }
  std::size_t count_ones() const;

  /// Values as reals in {0,1}, e.g. as a solver target.
  template <typename Real>
  Plane<Real> as_real() const {
    Plane<Real> out(height(), width());
    std::transform(data().begin(), data().end(), out.data().begin(),
                   [](std::uint8_t v) { return static_cast<Real>(v); });
    return out;
  }
  template <typename Real>
  BasicSoftMask<Real> as_soft() const {
    return BasicSoftMask<Real>(as_real<Real>());
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Plane<std::uint8_t> values_;
};

/// Binary occlusion mask: 1 keeps a pixel, 0 hides it. The zero fraction is
/// derived from the data at construction and therefore always consistent.
class ScribbleMask {
 public:
  ScribbleMask() = default;
  explicit ScribbleMask(Plane<std::uint8_t> values);
  ScribbleMask(int height, int width, std::uint8_t fill);

  int height() const { return values_.height(); }
  int width() const { return values_.width(); }
  std::size_t size() const { return values_.size(); }
  std::uint8_t operator()(int y, int x) const { return values_(y, x); }
  std::span<const std::uint8_t> data() const { return values_.data(); }
  const Plane<std::uint8_t>& plane() const { return values_; }
  double zero_fraction() const { return zero_fraction_; }

  friend bool operator==(const ScribbleMask&, const ScribbleMask&) = default;

 private:
  Plane<std::uint8_t> values_;
  double zero_fraction_ = 0.0;
};

/// Inclusive pixel box.
struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool valid_within(int image_width, int image_height) const {
    return 0 <= x_min && x_min <= x_max && x_max < image_width && 0 <= y_min &&
           y_min <= y_max && y_max < image_height;
  }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ChannelStats {
  std::array<float, 3> mean;
  std::array<float, 3> std;
};

inline constexpr ChannelStats kImageNetStats{{0.485f, 0.456f, 0.406f}, {0.229f, 0.224f, 0.225f}};

/// I ⊙ M: every channel of a pixel is multiplied by the mask value.
ImageTensor apply_mask(const ImageTensor& image, const ScribbleMask& mask);

/// (raw/255 - mean)/std per channel.
ImageTensor normalize_image(const ImageTensor& raw, const ChannelStats& stats = kImageNetStats);

/// Inverse of normalize_image, back to 0..255.
ImageTensor denormalize_image(const ImageTensor& normalized,
                              const ChannelStats& stats = kImageNetStats);

ImageTensor resize_bilinear(const ImageTensor& image, int out_h, int out_w);
BinaryMask resize_nearest(const BinaryMask& mask, int out_h, int out_w);
ScribbleMask resize_nearest(const ScribbleMask& mask, int out_h, int out_w);
Plane<float> resize_nearest(const Plane<float>& plane, int out_h, int out_w);

namespace detail {

// Half-pixel source coordinate for bilinear sampling without corner
// alignment, clamped to the valid range.
struct Tap {
  int lo;
  int hi;
  double frac;
};

inline Tap bilinear_tap(int dst, int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  double src = (dst + 0.5) * scale - 0.5;
  if (src < 0.0) src = 0.0;
  int lo = static_cast<int>(src);
  if (lo > in_size - 1) lo = in_size - 1;
  const int hi = std::min(lo + 1, in_size - 1);
  const double frac = std::min(src - lo, 1.0);
  return {lo, hi, hi == lo ? 0.0 : frac};
}

inline int nearest_index(int dst, int in_size, int out_size) {
  const double scale = static_cast<double>(in_size) / out_size;
  return std::min(static_cast<int>(std::floor((dst + 0.5) * scale)), in_size - 1);
}

inline void check_target(int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) {
    throw InvalidArgument("resize target must be at least 1x1, got " + std::to_string(out_h) +
                          "x" + std::to_string(out_w));
  }
}

}  // namespace detail

/// Bilinear resize of a single-channel grid (align_corners = false).
template <typename T>
Plane<T> resize_bilinear(const Plane<T>& in, int out_h, int out_w) {
  detail::check_target(out_h, out_w);
  if (in.height() == out_h && in.width() == out_w) return in;
  std::vector<detail::Tap> xs(out_w);
  for (int x = 0; x < out_w; ++x) xs[x] = detail::bilinear_tap(x, in.width(), out_w);
  Plane<T> out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    const auto ty = detail::bilinear_tap(y, in.height(), out_h);
    for (int x = 0; x < out_w; ++x) {
      const auto& tx = xs[x];
      const double top = (1.0 - tx.frac) * in(ty.lo, tx.lo) + tx.frac * in(ty.lo, tx.hi);
      const double bottom = (1.0 - tx.frac) * in(ty.hi, tx.lo) + tx.frac * in(ty.hi, tx.hi);
      out(y, x) = static_cast<T>((1.0 - ty.frac) * top + ty.frac * bottom);
    }
  }
  return out;
}

/// Transpose of resize_bilinear: scatters an (out_h × out_w) gradient back to
/// the (in_h × in_w) source grid.
template <typename T>
Plane<T> resize_bilinear_adjoint(const Plane<T>& grad_out, int in_h, int in_w) {
  detail::check_target(in_h, in_w);
  if (grad_out.height() == in_h && grad_out.width() == in_w) return grad_out;
  const int out_h = grad_out.height();
  const int out_w = grad_out.width();
  std::vector<double> acc(static_cast<std::size_t>(in_h) * in_w, 0.0);
  std::vector<detail::Tap> xs(out_w);
  for (int x = 0; x < out_w; ++x) xs[x] = detail::bilinear_tap(x, in_w, out_w);
  for (int y = 0; y < out_h; ++y) {
    const auto ty = detail::bilinear_tap(y, in_h, out_h);
    for (int x = 0; x < out_w; ++x) {
      const auto& tx = xs[x];
      const double g = grad_out(y, x);
      acc[static_cast<std::size_t>(ty.lo) * in_w + tx.lo] += g * (1.0 - ty.frac) * (1.0 - tx.frac);
      acc[static_cast<std::size_t>(ty.lo) * in_w + tx.hi] += g * (1.0 - ty.frac) * tx.frac;
      acc[static_cast<std::size_t>(ty.hi) * in_w + tx.lo] += g * ty.frac * (1.0 - tx.frac);
      acc[static_cast<std::size_t>(ty.hi) * in_w + tx.hi] += g * ty.frac * tx.frac;
    }
  }
  Plane<T> out(in_h, in_w);
  std::transform(acc.begin(), acc.end(), out.data().begin(),
                 [](double v) { return static_cast<T>(v); });
  return out;
}

template <typename Real>
BasicSoftMask<Real> resize_bilinear(const BasicSoftMask<Real>& mask, int out_h, int out_w) {
  Plane<Real> out = resize_bilinear(mask.plane(), out_h, out_w);
  // Convex combinations stay in [0,1]; clamp only absorbs rounding.
  for (auto& v : out.data()) v = std::clamp(v, Real(0), Real(1));
  return BasicSoftMask<Real>(std::move(out));
}

}  // namespace peekaboo
