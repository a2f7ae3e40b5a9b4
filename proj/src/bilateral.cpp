// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/bilateral.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

namespace peekaboo {

namespace {

constexpr double kDiagMin = 1e-5;

// Coordinates are packed 12 bits per dimension around a bias; the lattice of
// any image we handle is far smaller than that range.
constexpr int kCoordBits = 12;
constexpr std::int64_t kCoordBias = 1 << (kCoordBits - 1);

std::uint64_t pack(const std::array<std::int32_t, BilateralGrid::kDims>& c) {
  std::uint64_t key = 0;
  for (int d = 0; d < BilateralGrid::kDims; ++d) {
    const std::int64_t v = c[d] + kCoordBias;
    if (v < 0 || v >= (std::int64_t{1} << kCoordBits)) {
      throw InvalidArgument("bilateral lattice coordinate out of range; bandwidth too small");
    }
    key |= static_cast<std::uint64_t>(v) << (kCoordBits * d);
  }
  return key;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(sigma_spatial > 0) || !(sigma_luma > 0) || !(sigma_chroma > 0)) {
    throw InvalidArgument("solver bandwidths must be > 0");
  }
  if (!(lambda >= 0)) throw InvalidArgument("solver lambda must be >= 0");
  if (!(pcg_tol > 0)) throw InvalidArgument("solver pcg_tol must be > 0");
  if (pcg_max_iter < 0) throw InvalidArgument("solver pcg_max_iter must be >= 0");
}

int SolverConfig::max_iterations() const {
  return pcg_max_iter > 0 ? pcg_max_iter : 25 * BilateralGrid::kDims;
}

ImageTensor rgb_to_yuv(const ImageTensor& rgb) {
  ImageTensor out(rgb.height(), rgb.width());
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      const double r = rgb(y, x, 0);
      const double g = rgb(y, x, 1);
      const double b = rgb(y, x, 2);
      out(y, x, 0) = static_cast<float>(0.299 * r + 0.587 * g + 0.114 * b);
      out(y, x, 1) = static_cast<float>(-0.168736 * r - 0.331264 * g + 0.5 * b + 128.0);
      out(y, x, 2) = static_cast<float>(0.5 * r - 0.418688 * g - 0.081312 * b + 128.0);
    }
  }
  return out;
}

BilateralGrid::BilateralGrid(const ImageTensor& reference, const SolverConfig& cfg)
    : height_(reference.height()), width_(reference.width()) {
  cfg.validate();
  const ImageTensor yuv = rgb_to_yuv(reference);
  vertex_of_pixel_.resize(reference.pixel_count());

  std::unordered_map<std::uint64_t, int> index;
  index.reserve(reference.pixel_count());
  std::size_t p = 0;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x, ++p) {
      const std::array<std::int32_t, kDims> c{
          static_cast<std::int32_t>(std::floor(x / cfg.sigma_spatial)),
          static_cast<std::int32_t>(std::floor(y / cfg.sigma_spatial)),
          static_cast<std::int32_t>(std::floor(yuv(y, x, 0) / cfg.sigma_luma)),
          static_cast<std::int32_t>(std::floor(yuv(y, x, 1) / cfg.sigma_chroma)),
          static_cast<std::int32_t>(std::floor(yuv(y, x, 2) / cfg.sigma_chroma)),
      };
      auto [it, inserted] = index.try_emplace(pack(c), static_cast<int>(vertex_count_));
      if (inserted) {
        coords_.insert(coords_.end(), c.begin(), c.end());
        ++vertex_count_;
      }
      vertex_of_pixel_[p] = it->second;
    }
  }

  neighbors_.resize(vertex_count_);
  for (std::size_t v = 0; v < vertex_count_; ++v) {
    std::array<std::int32_t, kDims> c;
    std::copy_n(coords_.begin() + static_cast<std::ptrdiff_t>(v * kDims), kDims, c.begin());
    for (int d = 0; d < kDims; ++d) {
      for (int s = 0; s < 2; ++s) {
        auto nc = c;
        nc[d] += s == 0 ? -1 : 1;
        int nb = -1;
        // Out-of-range neighbours cannot exist in the lattice.
        const std::int64_t biased = nc[d] + kCoordBias;
        if (biased >= 0 && biased < (std::int64_t{1} << kCoordBits)) {
          if (auto it = index.find(pack(nc)); it != index.end()) nb = it->second;
        }
        neighbors_[v][2 * d + s] = nb;
      }
    }
  }

  // Bistochastization: find n so that n ⊙ B n matches the pixel counts, then
  // define m from n exactly so Dm^-1 Dn B Dn 1 = 1 holds to rounding.
  const std::vector<double> ones(pixel_count(), 1.0);
  const std::vector<double> counts = splat(ones);
  n_.assign(vertex_count_, 1.0);
  for (int it = 0; it < kBistochasticIterations; ++it) {
    const auto bn = blur(n_);
    for (std::size_t v = 0; v < vertex_count_; ++v) n_[v] = std::sqrt(n_[v] * counts[v] / bn[v]);
  }
  const auto bn = blur(n_);
  m_.resize(vertex_count_);
  for (std::size_t v = 0; v < vertex_count_; ++v) m_[v] = n_[v] * bn[v];
}

std::vector<double> BilateralGrid::splat(std::span<const double> pixel_values) const {
  if (pixel_values.size() != pixel_count()) throw ShapeError("splat: pixel count mismatch");
  std::vector<double> out(vertex_count_, 0.0);
  for (std::size_t p = 0; p < pixel_values.size(); ++p) out[vertex_of_pixel_[p]] += pixel_values[p];
  return out;
}

std::vector<double> BilateralGrid::slice(std::span<const double> vertex_values) const {
  if (vertex_values.size() != vertex_count_) throw ShapeError("slice: vertex count mismatch");
  std::vector<double> out(pixel_count());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = vertex_values[vertex_of_pixel_[p]];
  return out;
}

std::vector<double> BilateralGrid::blur(std::span<const double> x) const {
  if (x.size() != vertex_count_) throw ShapeError("blur: vertex count mismatch");
  std::vector<double> out(vertex_count_);
  for (std::size_t v = 0; v < vertex_count_; ++v) {
    double s = 2.0 * kDims * x[v];
    for (int nb : neighbors_[v]) {
      if (nb >= 0) s += x[nb];
    }
    out[v] = s;
  }
  return out;
}

std::vector<double> apply_system(const BilateralGrid& grid, const SolverConfig& cfg,
                                 std::span<const double> splat_confidence,
                                 std::span<const double> y) {
  const auto n = grid.bistochastic_n();
  const auto m = grid.bistochastic_m();
  std::vector<double> ny(y.size());
  for (std::size_t v = 0; v < y.size(); ++v) ny[v] = n[v] * y[v];
  const auto bny = grid.blur(ny);
  std::vector<double> out(y.size());
  for (std::size_t v = 0; v < y.size(); ++v) {
    out[v] = cfg.lambda * (m[v] * y[v] - n[v] * bny[v]) + splat_confidence[v] * y[v];
  }
  return out;
}

SolveResult bilateral_solve(const BilateralGrid& grid, const Plane<float>& target,
                            const Plane<float>& confidence, const SolverConfig& cfg) {
  cfg.validate();
  if (target.height() != grid.height() || target.width() != grid.width() ||
      !target.same_shape(confidence)) {
    throw ShapeError("bilateral_solve: reference, target and confidence must share H×W");
  }
  const std::size_t np = grid.pixel_count();
  std::vector<double> c(np), ct(np);
  double total_conf = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    const double ci = confidence.data()[p];
    const double ti = target.data()[p];
    if (!(ci >= 0.0) || !std::isfinite(ci)) {
      throw InvalidArgument("bilateral_solve: confidence must be finite and >= 0");
    }
    if (!std::isfinite(ti)) throw InvalidArgument("bilateral_solve: target must be finite");
    c[p] = ci;
    ct[p] = ci * ti;
    total_conf += ci;
  }
  if (total_conf == 0.0) throw InvalidArgument("bilateral_solve: confidence is zero everywhere");

  const std::vector<double> sc = grid.splat(c);
  const std::vector<double> b = grid.splat(ct);
  const std::size_t nv = grid.vertex_count();
  const auto n = grid.bistochastic_n();
  const auto m = grid.bistochastic_m();

  std::vector<double> inv_diag(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const double diag = cfg.lambda * (m[v] - n[v] * n[v] * 2.0 * BilateralGrid::kDims) + sc[v];
    inv_diag[v] = 1.0 / std::max(diag, kDiagMin);
  }

  // Flat initialization: confidence-weighted mean target per vertex.
  std::vector<double> y(nv, 0.0);
  for (std::size_t v = 0; v < nv; ++v) y[v] = sc[v] > 0.0 ? b[v] / sc[v] : 0.0;

  SolveResult result;
  const double b_norm = std::sqrt(dot(b, b));
  std::vector<double> r(nv), z(nv), dir(nv);
  {
    const auto ay = apply_system(grid, cfg, sc, y);
    for (std::size_t v = 0; v < nv; ++v) r[v] = b[v] - ay[v];
  }
  auto relative = [&](double r_norm) { return b_norm > 0.0 ? r_norm / b_norm : r_norm; };
  double rel = relative(std::sqrt(dot(r, r)));
  const int max_iter = cfg.max_iterations();
  int iter = 0;
  if (rel > cfg.pcg_tol) {
    for (std::size_t v = 0; v < nv; ++v) z[v] = inv_diag[v] * r[v];
    dir = z;
    double rz = dot(r, z);
    while (iter < max_iter) {
      const auto ad = apply_system(grid, cfg, sc, dir);
      const double denom = dot(dir, ad);
      if (!(denom > 0.0)) break;
      const double alpha = rz / denom;
      for (std::size_t v = 0; v < nv; ++v) {
        y[v] += alpha * dir[v];
        r[v] -= alpha * ad[v];
      }
      ++iter;
      rel = relative(std::sqrt(dot(r, r)));
      if (rel <= cfg.pcg_tol) break;
      for (std::size_t v = 0; v < nv; ++v) z[v] = inv_diag[v] * r[v];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t v = 0; v < nv; ++v) dir[v] = z[v] + beta * dir[v];
    }
  }

  // Report the true residual rather than the recursively updated one.
  {
    const auto ay = apply_system(grid, cfg, sc, y);
    double s = 0.0;
    for (std::size_t v = 0; v < nv; ++v) s += (b[v] - ay[v]) * (b[v] - ay[v]);
    result.relative_residual = relative(std::sqrt(s));
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw NumericError("bilateral_solve produced a non-finite value");
  }
  result.iterations = iter;
  result.converged = result.relative_residual <= cfg.pcg_tol;

  const auto sliced = grid.slice(y);
  Plane<float> out(grid.height(), grid.width());
  for (std::size_t p = 0; p < np; ++p) {
    out.data()[p] = static_cast<float>(std::clamp(sliced[p], 0.0, 1.0));
  }
  result.output = SoftMask(std::move(out));
  result.vertex_solution = std::move(y);
  return result;
}

SolveResult bilateral_solve(const ImageTensor& reference, const Plane<float>& target,
                            const Plane<float>& confidence, const SolverConfig& cfg) {
  return bilateral_solve(BilateralGrid(reference, cfg), target, confidence, cfg);
}

}  // namespace peekaboo
