// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/refine.hpp"

namespace peekaboo {

ZetaResult zeta_binary(const BinaryMask& binarized, const BilateralGrid& grid,
                       const SolverConfig& cfg) {
  const Plane<float> target = binarized.as_real<float>();
  const Plane<float> confidence(target.height(), target.width(), 1.0f);
  SolveResult solve = bilateral_solve(grid, target, confidence, cfg);
  BinaryMask refined = binarize(solve.output);
  return {std::move(refined), std::move(solve)};
}

BilateralGrid make_reference_grid(const ImageTensor& normalized_reference, const SolverConfig& cfg,
                                  const ChannelStats& stats) {
  return BilateralGrid(denormalize_image(normalized_reference, stats), cfg);
}

BinaryMask zeta(const SoftMask& mask, const ImageTensor& normalized_reference,
                const SolverConfig& cfg, const ChannelStats& stats) {
  if (mask.height() != normalized_reference.height() ||
      mask.width() != normalized_reference.width()) {
    throw ShapeError("zeta: mask and reference differ in size");
  }
  return zeta(mask, make_reference_grid(normalized_reference, cfg, stats), cfg);
}

}  // namespace peekaboo
