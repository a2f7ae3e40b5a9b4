// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// The trainable half of the segmenter: a 1×1 convolution from D features to
// two class logits. Channel 1 is foreground.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peekaboo/features.hpp"
#include "peekaboo/image.hpp"

namespace peekaboo {

inline constexpr int kNumClasses = 2;
inline constexpr int kForeground = 1;

enum class HeadInit {
  kZeros,     // every patch starts at p = 0.5
  kGaussian,  // weights ~ N(0, 1/D), biases zero
};

HeadInit parse_head_init(std::string_view text);
std::string_view to_string(HeadInit init);

/// weights is D×2 row-major: weights[d * 2 + k].
struct DecoderParams {
  int dim = 0;
  std::vector<double> weights;
  std::array<double, kNumClasses> biases{};

  static DecoderParams zeros(int dim);
  /// Weights ~ N(0, 1/D), biases zero.
  static DecoderParams gaussian(int dim, std::uint64_t seed);

  std::size_t parameter_count() const { return weights.size() + biases.size(); }
  double weight(int d, int k) const { return weights[static_cast<std::size_t>(d) * kNumClasses + k]; }
  double& weight(int d, int k) { return weights[static_cast<std::size_t>(d) * kNumClasses + k]; }

  /// Weights followed by biases.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  DecoderParams& operator+=(const DecoderParams& other);
  DecoderParams& operator*=(double s);
  friend bool operator==(const DecoderParams&, const DecoderParams&) = default;
};

/// Gradients share the parameter layout.
using DecoderGrads = DecoderParams;

template <typename Real>
struct HeadOutput {
  int grid_h = 0;
  int grid_w = 0;
  std::vector<double> logits;         // grid_h × grid_w × 2
  BasicSoftMask<Real> prob_fg_patch;  // grid_h × grid_w
  BasicSoftMask<Real> prob_fg_full;   // bilinear upsample of prob_fg_patch

  double logit(int i, int j, int k) const {
    return logits[(static_cast<std::size_t>(i) * grid_w + j) * kNumClasses + k];
  }
};

namespace detail {

inline void check_dims(const DecoderParams& params, const FeatureGrid& features) {
  if (features.dim() != params.dim) {
    throw ShapeError("feature dim " + std::to_string(features.dim()) +
                     " does not match head dim " + std::to_string(params.dim));
  }
}

inline std::array<double, kNumClasses> patch_logits(const DecoderParams& params,
                                                    std::span<const float> f) {
  std::array<double, kNumClasses> l = params.biases;
  for (int d = 0; d < params.dim; ++d) {
    const double v = f[d];
    l[0] += v * params.weight(d, 0);
    l[1] += v * params.weight(d, 1);
  }
  return l;
}

/// softmax(l)[fg] computed without overflow.
inline double foreground_probability(const std::array<double, kNumClasses>& l) {
  const double z = l[1] - l[0];
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace detail

/// Two-way softmax over both channels; the pair sums to one.
inline std::array<double, kNumClasses> softmax2(const std::array<double, kNumClasses>& l) {
  const double m = std::max(l[0], l[1]);
  const double e0 = std::exp(l[0] - m);
  const double e1 = std::exp(l[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

template <typename Real = float>
HeadOutput<Real> head_forward(const DecoderParams& params, const FeatureGrid& features, int out_h,
                              int out_w) {
  detail::check_dims(params, features);
  HeadOutput<Real> out;
  out.grid_h = features.grid_h();
  out.grid_w = features.grid_w();
  out.logits.resize(features.patch_count() * kNumClasses);
  Plane<Real> prob(out.grid_h, out.grid_w);
  for (int i = 0; i < out.grid_h; ++i) {
    for (int j = 0; j < out.grid_w; ++j) {
      const auto l = detail::patch_logits(params, features.patch(i, j));
      const std::size_t at = static_cast<std::size_t>(i) * out.grid_w + j;
      out.logits[at * kNumClasses] = l[0];
      out.logits[at * kNumClasses + 1] = l[1];
      prob(i, j) = static_cast<Real>(detail::foreground_probability(l));
    }
  }
  out.prob_fg_patch = BasicSoftMask<Real>(std::move(prob));
  out.prob_fg_full = resize_bilinear(out.prob_fg_patch, out_h, out_w);
  return out;
}

/// Exact gradients of a scalar objective with respect to the head parameters,
/// given its gradient with respect to the patch-level foreground probability.
/// The features receive no gradient.
template <typename Real>
DecoderGrads head_backward(const DecoderParams& params, const FeatureGrid& features,
                           const Plane<Real>& grad_prob_fg_patch) {
  detail::check_dims(params, features);
  if (grad_prob_fg_patch.height() != features.grid_h() ||
      grad_prob_fg_patch.width() != features.grid_w()) {
    throw ShapeError("gradient grid does not match the patch grid");
  }
  DecoderGrads grads = DecoderParams::zeros(params.dim);
  for (int i = 0; i < features.grid_h(); ++i) {
    for (int j = 0; j < features.grid_w(); ++j) {
      const double g = grad_prob_fg_patch(i, j);
      if (!std::isfinite(g)) {
        throw NumericError("non-finite upstream gradient at patch (" + std::to_string(i) + ", " +
                           std::to_string(j) + ")");
      }
      if (g == 0.0) continue;
      const auto f = features.patch(i, j);
      const double p = detail::foreground_probability(detail::patch_logits(params, f));
      // d p / d l1 = p (1 - p) = - d p / d l0
      const double dl1 = g * p * (1.0 - p);
      for (int d = 0; d < params.dim; ++d) {
        grads.weight(d, 1) += dl1 * f[d];
        grads.weight(d, 0) -= dl1 * f[d];
      }
      grads.biases[1] += dl1;
      grads.biases[0] -= dl1;
    }
  }
  return grads;
}

/// head_backward for a gradient given at the upsampled (full) resolution.
template <typename Real>
DecoderGrads head_backward_full(const DecoderParams& params, const FeatureGrid& features,
                                const Plane<Real>& grad_prob_fg_full) {
  return head_backward(params, features,
                       resize_bilinear_adjoint(grad_prob_fg_full, features.grid_h(),
                                               features.grid_w()));
}

}  // namespace peekaboo
