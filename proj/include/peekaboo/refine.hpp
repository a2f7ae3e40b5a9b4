// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// Pseudo-label refinement: binarize, smooth with the bilateral solver under
// uniform confidence, binarize again.

#pragma once

#include "peekaboo/bilateral.hpp"
#include "peekaboo/image.hpp"

namespace peekaboo {

inline constexpr double kBinarizeThreshold = 0.5;

/// 1 iff value > threshold.
template <typename Real>
BinaryMask binarize(const BasicSoftMask<Real>& mask, double threshold = kBinarizeThreshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("binarize threshold must lie in (0,1)");
  }
  Plane<std::uint8_t> out(mask.height(), mask.width());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    out.data()[i] = static_cast<double>(mask.data()[i]) > threshold ? 1 : 0;
  }
  return BinaryMask(std::move(out));
}

struct ZetaResult {
  BinaryMask mask;
  SolveResult solve;
};

/// Refines an already binarized mask on a prebuilt grid.
ZetaResult zeta_binary(const BinaryMask& binarized, const BilateralGrid& grid,
                       const SolverConfig& cfg);

template <typename Real>
ZetaResult zeta_detailed(const BasicSoftMask<Real>& mask, const BilateralGrid& grid,
                         const SolverConfig& cfg) {
  return zeta_binary(binarize(mask), grid, cfg);
}

/// normalized_reference is in normalized image space; it is mapped back to
/// 0..255 RGB before building the lattice.
BinaryMask zeta(const SoftMask& mask, const ImageTensor& normalized_reference,
                const SolverConfig& cfg, const ChannelStats& stats = kImageNetStats);

template <typename Real>
BinaryMask zeta(const BasicSoftMask<Real>& mask, const BilateralGrid& grid,
                const SolverConfig& cfg) {
  return zeta_detailed(mask, grid, cfg).mask;
}

/// Grid over a normalized image.
BilateralGrid make_reference_grid(const ImageTensor& normalized_reference, const SolverConfig& cfg,
                                  const ChannelStats& stats = kImageNetStats);

}  // namespace peekaboo
