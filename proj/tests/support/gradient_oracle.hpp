// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "peekaboo/head.hpp"
#include "peekaboo/losses.hpp"
#include "peekaboo/refine.hpp"
#include "test_support.hpp"

namespace peekaboo::testing {

enum class LossTermId { kSeg, kMfp, kPcl, kAux, kTotal };

inline const char* term_name(LossTermId t) {
  switch (t) {
    case LossTermId::kSeg: return "l_seg";
    case LossTermId::kMfp: return "l_mfp";
    case LossTermId::kPcl: return "l_pcl";
    case LossTermId::kAux: return "l_aux";
    case LossTermId::kTotal: return "l_total";
  }
  return "?";
}

// One small two-branch problem with detached targets.
struct GradInstance {
  DecoderParams params;
  FeatureGrid unmasked;
  FeatureGrid masked;
  int out_h = 0;
  int out_w = 0;
  BinaryMask zeta_p;
  BinaryMask zeta_pm;
  BinaryMask aux_target;
  LossConfig cfg;
};

inline GradInstance make_grad_instance(std::uint64_t seed) {
  RandomStream rng(seed, {0x67726164ULL});
  GradInstance in;
  const int gh = rng.uniform_int(1, 4);
  const int gw = rng.uniform_int(1, 4);
  const int dim = rng.uniform_int(2, 8);
  in.out_h = std::max(8, gh * 4);
  in.out_w = std::max(8, gw * 4);
  for (int attempt = 0;; ++attempt) {
    in.params = DecoderParams::zeros(dim);
    for (auto& w : in.params.weights) w = rng.normal() * 0.6;
    in.params.biases = {rng.normal() * 0.2, rng.normal() * 0.2};
    in.unmasked = random_features(gh, gw, dim, rng());
    in.masked = in.unmasked;
    for (auto& v : in.masked.data()) {
      if (rng.bernoulli(0.5)) v = 0.0f;
    }
    const auto m_p = head_forward<double>(in.params, in.unmasked, in.out_h, in.out_w).prob_fg_full;
    // Keep pixels away from the binarization boundary so the detached aux
    // target cannot flip under a finite-difference step.
    double closest = 1.0;
    for (double v : m_p.data()) closest = std::min(closest, std::abs(v - 0.5));
    if (closest < 1e-4 && attempt < 100) continue;
    in.aux_target = binarize(m_p);
    break;
  }
  const auto ref = random_image(in.out_h, in.out_w, rng());
  SolverConfig solver;
  solver.sigma_spatial = 4.0;
  const BilateralGrid grid(ref, solver);
  in.zeta_p = zeta(head_forward<double>(in.params, in.unmasked, in.out_h, in.out_w).prob_fg_full,
                   grid, solver);
  in.zeta_pm = zeta(head_forward<double>(in.params, in.masked, in.out_h, in.out_w).prob_fg_full,
                    grid, solver);
  in.cfg.alpha = 1.5;
  in.cfg.aux_weight = 4.0;
  return in;
}

// Loss value in double precision with every target held fixed.
inline double loss_value(const GradInstance& in, const DecoderParams& params, LossTermId term) {
  const auto m_p = head_forward<double>(params, in.unmasked, in.out_h, in.out_w).prob_fg_full;
  const auto m_pm = head_forward<double>(params, in.masked, in.out_h, in.out_w).prob_fg_full;
  const double seg = loss_seg(m_p, in.zeta_p).value;
  const double mfp = loss_mfp(m_pm, in.zeta_pm).value;
  const double pcl = loss_pcl(m_p, m_pm, in.zeta_p, in.zeta_pm, PclMode::kSoft).value;
  const double aux = bce(m_p, in.aux_target).value;
  switch (term) {
    case LossTermId::kSeg: return seg;
    case LossTermId::kMfp: return mfp;
    case LossTermId::kPcl: return pcl;
    case LossTermId::kAux: return aux;
    case LossTermId::kTotal: return weighted_total(in.cfg, seg, mfp, pcl, aux);
  }
  return 0.0;
}

// Analytic gradient through the single-precision pipeline path.
inline std::vector<double> analytic_gradient(const GradInstance& in, LossTermId term) {
  const auto m_p = head_forward<float>(in.params, in.unmasked, in.out_h, in.out_w).prob_fg_full;
  const auto m_pm = head_forward<float>(in.params, in.masked, in.out_h, in.out_w).prob_fg_full;
  const int h = in.out_h, w = in.out_w;
  Plane<float> gp(h, w, 0.0f), gpm(h, w, 0.0f);
  switch (term) {
    case LossTermId::kSeg: gp = loss_seg(m_p, in.zeta_p).grad; break;
    case LossTermId::kMfp: gpm = loss_mfp(m_pm, in.zeta_pm).grad; break;
    case LossTermId::kPcl: {
      auto t = loss_pcl(m_p, m_pm, in.zeta_p, in.zeta_pm, PclMode::kSoft);
      gp = t.grad_p;
      gpm = t.grad_pm;
      break;
    }
    case LossTermId::kAux: gp = loss_aux(m_p).grad; break;
    case LossTermId::kTotal: {
      const auto r = total_loss(BranchOutputs<float>{&m_p, &m_pm, &in.zeta_p, &in.zeta_pm}, in.cfg);
      gp = r.grad_p;
      gpm = r.grad_pm;
      break;
    }
  }
  DecoderGrads g = head_backward_full(in.params, in.unmasked, gp);
  g += head_backward_full(in.params, in.masked, gpm);
  return g.flatten();
}

inline std::vector<double> numeric_gradient(const GradInstance& in, LossTermId term,
                                            double step = 1e-5) {
  const auto flat = in.params.flatten();
  std::vector<double> out(flat.size());
  DecoderParams p = in.params;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    auto v = flat;
    v[k] = flat[k] + step;
    p.assign(v);
    const double up = loss_value(in, p, term);
    v[k] = flat[k] - step;
    p.assign(v);
    const double dn = loss_value(in, p, term);
    out[k] = (up - dn) / (2 * step);
  }
  return out;
}

// Largest per-component relative error, with components measured against the
// gradient's own scale so exact zeros do not divide by zero.
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double denom = std::max({std::abs(a[k]), std::abs(b[k]), 1e-3 * scale, 1e-12});
    worst = std::max(worst, std::abs(a[k] - b[k]) / denom);
  }
  return worst;
}

}  // namespace peekaboo::testing
