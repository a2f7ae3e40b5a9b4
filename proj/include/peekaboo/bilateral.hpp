// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// Edge-aware fast bilateral solver.
//
// Pixels are splatted onto a sparse 5-D lattice (x, y, luma, chroma_u, chroma_v,
// each divided by its bandwidth and floored). Smoothing happens on the
// lattice: the blur is the sum over dimensions of a [1, 2, 1] filter, made
// bistochastic with diagonal scalings Dn and Dm, and the solver minimizes
//
//   lambda * y' (Dm - Dn B Dn) y + sum_i c_i (y[v(i)] - t_i)^2
//
// whose normal equations are (lambda (Dm - Dn B Dn) + diag(S c)) y = S (c ⊙ t).
// The result is sliced back to pixels.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "peekaboo/image.hpp"

namespace peekaboo {

struct SolverConfig {
  double sigma_spatial = 16.0;
  double sigma_luma = 16.0;
  double sigma_chroma = 8.0;
  double lambda = 30.0;
  double pcg_tol = 1e-5;
  /// 0 means 25 × lattice dimensionality.
  int pcg_max_iter = 0;

  void validate() const;
  int max_iterations() const;
};

/// BT.601 luma/chroma of a 0..255 RGB image; chroma is offset by 128.
ImageTensor rgb_to_yuv(const ImageTensor& rgb255);

class BilateralGrid {
 public:
  static constexpr int kDims = 5;
  static constexpr int kBistochasticIterations = 10;

  /// reference holds 0..255 RGB values.
  BilateralGrid(const ImageTensor& reference, const SolverConfig& cfg);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return vertex_of_pixel_.size(); }
  std::size_t vertex_count() const { return vertex_count_; }

  std::span<const int> vertex_of_pixel() const { return vertex_of_pixel_; }
  /// Lattice coordinates of each vertex (row-major, kDims per vertex).
  std::span<const std::int32_t> vertex_coords() const { return coords_; }

  std::vector<double> splat(std::span<const double> pixel_values) const;
  std::vector<double> slice(std::span<const double> vertex_values) const;
  /// 2·kDims·x + sum of the ±1 lattice neighbours along every dimension.
  std::vector<double> blur(std::span<const double> vertex_values) const;

  std::span<const double> bistochastic_n() const { return n_; }
  std::span<const double> bistochastic_m() const { return m_; }

 private:
  int height_;
  int width_;
  std::size_t vertex_count_ = 0;
  std::vector<int> vertex_of_pixel_;
  std::vector<std::int32_t> coords_;
  std::vector<std::array<int, 2 * kDims>> neighbors_;  // -1 where absent
  std::vector<double> n_;
  std::vector<double> m_;
};

struct SolveResult {
  SoftMask output;
  bool converged = false;
  int iterations = 0;
  /// ||A y - b|| / ||b|| of the returned lattice solution.
  double relative_residual = 0.0;
  std::vector<double> vertex_solution;
};

/// Applies A = lambda (Dm - Dn B Dn) + diag(splat_confidence) to y.
std::vector<double> apply_system(const BilateralGrid& grid, const SolverConfig& cfg,
                                 std::span<const double> splat_confidence,
                                 std::span<const double> y);

/// Solves for target with per-pixel confidence (all >= 0, not all zero).
/// Non-convergence is reported through SolveResult::converged.
SolveResult bilateral_solve(const BilateralGrid& grid, const Plane<float>& target,
                            const Plane<float>& confidence, const SolverConfig& cfg);
SolveResult bilateral_solve(const ImageTensor& reference, const Plane<float>& target,
                            const Plane<float>& confidence, const SolverConfig& cfg);

}  // namespace peekaboo
