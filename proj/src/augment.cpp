// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/augment.hpp"

#include <cmath>

namespace peekaboo {

AugmentDraw draw_augment(const AugmentConfig& cfg, RandomStream& rng) {
  AugmentDraw d;
  d.scale = rng.uniform(cfg.scale_min, cfg.scale_max);
  d.blur = rng.bernoulli(cfg.blur_probability);
  // Drawn unconditionally so the stream position does not depend on the coin.
  d.sigma = rng.uniform(cfg.blur_sigma_min, cfg.blur_sigma_max);
  return d;
}

ImageTensor scale_about_center(const ImageTensor& image, double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("scale must be > 0");
  if (scale == 1.0) return image;
  const int h = image.height();
  const int w = image.width();
  ImageTensor out(h, w, 0.0f);
  const double cy = 0.5 * h;
  const double cx = 0.5 * w;
  for (int y = 0; y < h; ++y) {
    const double sy = (y + 0.5 - cy) / scale + cy - 0.5;
    if (sy < -0.5 || sy > h - 0.5) continue;
    const double fy = std::clamp(sy, 0.0, h - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, h - 1);
    const double ty = fy - y0;
    for (int x = 0; x < w; ++x) {
      const double sx = (x + 0.5 - cx) / scale + cx - 0.5;
      if (sx < -0.5 || sx > w - 0.5) continue;
      const double fx = std::clamp(sx, 0.0, w - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, w - 1);
      const double tx = fx - x0;
      for (int c = 0; c < ImageTensor::kChannels; ++c) {
        const double top = (1 - tx) * image(y0, x0, c) + tx * image(y0, x1, c);
        const double bottom = (1 - tx) * image(y1, x0, c) + tx * image(y1, x1, c);
        out(y, x, c) = static_cast<float>((1 - ty) * top + ty * bottom);
      }
    }
  }
  return out;
}

ImageTensor gaussian_blur(const ImageTensor& image, double sigma, int kernel) {
  if (!(sigma > 0.0)) throw InvalidArgument("blur sigma must be > 0");
  if (kernel < 1 || kernel % 2 == 0) throw InvalidArgument("blur kernel must be odd");
  const int r = kernel / 2;
  std::vector<double> k(kernel);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (auto& v : k) v /= sum;

  const int h = image.height();
  const int w = image.width();
  ImageTensor tmp(h, w);
  ImageTensor out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int i = -r; i <= r; ++i) s += k[i + r] * image(y, std::clamp(x + i, 0, w - 1), c);
        tmp(y, x, c) = static_cast<float>(s);
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int i = -r; i <= r; ++i) s += k[i + r] * tmp(std::clamp(y + i, 0, h - 1), x, c);
        out(y, x, c) = static_cast<float>(s);
      }
    }
  }
  return out;
}

ImageTensor augment(const ImageTensor& image, const AugmentDraw& draw, int kernel) {
  ImageTensor out = scale_about_center(image, draw.scale);
  if (draw.blur) out = gaussian_blur(out, draw.sigma, kernel);
  return out;
}

ImageTensor augment(const ImageTensor& image, const AugmentConfig& cfg, RandomStream& rng) {
  if (!cfg.enabled) return image;
  return augment(image, draw_augment(cfg, rng), cfg.blur_kernel);
}

}  // namespace peekaboo
