// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "peekaboo/config.hpp"
#include "peekaboo/image.hpp"
#include "peekaboo/random.hpp"

namespace peekaboo {

struct AugmentDraw {
  double scale = 1.0;
  bool blur = false;
  double sigma = 0.0;
};

AugmentDraw draw_augment(const AugmentConfig& cfg, RandomStream& rng);

/// Scales about the image centre and crops or zero-pads back to the input size.
/// Padding is zero in whatever space the image lives in.
ImageTensor scale_about_center(const ImageTensor& image, double scale);

/// Separable Gaussian blur with replicated borders.
ImageTensor gaussian_blur(const ImageTensor& image, double sigma, int kernel);

ImageTensor augment(const ImageTensor& image, const AugmentDraw& draw, int kernel = 5);
ImageTensor augment(const ImageTensor& image, const AugmentConfig& cfg, RandomStream& rng);

}  // namespace peekaboo
