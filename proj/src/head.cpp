// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/head.hpp"

#include "peekaboo/random.hpp"

namespace peekaboo {

HeadInit parse_head_init(std::string_view text) {
  if (text == "zeros") return HeadInit::kZeros;
  if (text == "gaussian") return HeadInit::kGaussian;
  throw InvalidArgument("head init must be 'zeros' or 'gaussian', got '" + std::string(text) + "'");
}

std::string_view to_string(HeadInit init) {
  return init == HeadInit::kZeros ? "zeros" : "gaussian";
}

DecoderParams DecoderParams::zeros(int dim) {
  if (dim < 1) throw InvalidArgument("head feature dim must be positive");
  DecoderParams p;
  p.dim = dim;
  p.weights.assign(static_cast<std::size_t>(dim) * kNumClasses, 0.0);
  return p;
}

DecoderParams DecoderParams::gaussian(int dim, std::uint64_t seed) {
  DecoderParams p = zeros(dim);
  RandomStream rng(seed, {0x68656164ULL});
  const double stddev = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& w : p.weights) w = rng.normal() * stddev;
  return p;
}

std::vector<double> DecoderParams::flatten() const {
  std::vector<double> flat(weights);
  flat.insert(flat.end(), biases.begin(), biases.end());
  return flat;
}

void DecoderParams::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw ShapeError("expected " + std::to_string(parameter_count()) + " parameters, got " +
                     std::to_string(flat.size()));
  }
  std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(weights.size()),
            weights.begin());
  biases[0] = flat[weights.size()];
  biases[1] = flat[weights.size() + 1];
}

DecoderParams& DecoderParams::operator+=(const DecoderParams& other) {
  if (other.dim != dim) throw ShapeError("cannot add parameter sets of different dim");
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] += other.weights[i];
  biases[0] += other.biases[0];
  biases[1] += other.biases[1];
  return *this;
}

DecoderParams& DecoderParams::operator*=(double s) {
  for (auto& w : weights) w *= s;
  biases[0] *= s;
  biases[1] *= s;
  return *this;
}

}  // namespace peekaboo
