// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>

#include "peekaboo/image.hpp"

namespace peekaboo {

/// Reads an 8-bit PNG or JPEG as a raw RGB image with values in 0..255.
ImageTensor read_rgb_image(const std::filesystem::path& path);

/// Reads an 8-bit PNG or JPEG as a single-channel 0..255 grid.
Plane<float> read_gray_image(const std::filesystem::path& path);

/// Writes a raw image as 8-bit RGB PNG; values are rounded and clamped to 0..255.
void write_rgb_png(const std::filesystem::path& path, const ImageTensor& raw);

/// Writes a binary mask as an 8-bit grayscale PNG with values {0,255}.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
void write_mask_png(const std::filesystem::path& path, const ScribbleMask& mask);

/// Writes a soft mask scaled to 0..255.
void write_soft_png(const std::filesystem::path& path, const SoftMask& mask);

bool has_image_extension(const std::filesystem::path& path);

}  // namespace peekaboo
