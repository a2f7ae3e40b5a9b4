// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

// Training objective. Every term is a mean over pixels; refined targets are
// plain BinaryMask values and never receive gradient.
//
//   total = alpha * seg + mfp + pcl + aux_weight * aux

#pragma once

#include <string_view>

#include "peekaboo/image.hpp"
#include "peekaboo/refine.hpp"

namespace peekaboo {

inline constexpr double kBceEpsilon = 1e-7;

enum class PclMode {
  kSoft,     // mean (M_p - M_pm)^2, trainable
  kLiteral,  // mean of the squared difference of the two refined masks
};

PclMode parse_pcl_mode(std::string_view text);
std::string_view to_string(PclMode mode);

struct LossConfig {
  double alpha = 1.5;
  double aux_weight = 4.0;
  PclMode pcl_mode = PclMode::kSoft;
  bool enable_mfp = true;
  bool enable_pcl = true;

  void validate() const;
};

template <typename Real>
struct LossTerm {
  double value = 0.0;
  Plane<Real> grad;  // d value / d prediction
};

namespace detail {

inline void check_same(int h1, int w1, int h2, int w2, const char* what) {
  if (h1 != h2 || w1 != w2) {
    throw ShapeError(std::string(what) + ": shape " + std::to_string(h1) + "x" +
                     std::to_string(w1) + " vs " + std::to_string(h2) + "x" + std::to_string(w2));
  }
}

}  // namespace detail

template <typename Real>
LossTerm<Real> bce(const BasicSoftMask<Real>& pred, const BinaryMask& target) {
  detail::check_same(pred.height(), pred.width(), target.height(), target.width(), "bce");
  const double n = static_cast<double>(pred.size());
  LossTerm<Real> out{0.0, Plane<Real>(pred.height(), pred.width())};
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(static_cast<double>(pred.data()[i]), kBceEpsilon, 1.0 - kBceEpsilon);
    const double t = target.data()[i];
    sum -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    out.grad.data()[i] = static_cast<Real>((p - t) / (p * (1.0 - p)) / n);
  }
  out.value = sum / n;
  return out;
}

template <typename Real>
LossTerm<Real> loss_seg(const BasicSoftMask<Real>& m_p, const BinaryMask& zeta_m_p) {
  return bce(m_p, zeta_m_p);
}

template <typename Real>
LossTerm<Real> loss_mfp(const BasicSoftMask<Real>& m_pm, const BinaryMask& zeta_m_pm) {
  return bce(m_pm, zeta_m_pm);
}

template <typename Real>
struct PclTerm {
  double value = 0.0;
  Plane<Real> grad_p;
  Plane<Real> grad_pm;
};

template <typename Real>
PclTerm<Real> loss_pcl(const BasicSoftMask<Real>& m_p, const BasicSoftMask<Real>& m_pm,
                       const BinaryMask& zeta_p, const BinaryMask& zeta_pm, PclMode mode) {
  detail::check_same(m_p.height(), m_p.width(), m_pm.height(), m_pm.width(), "loss_pcl");
  detail::check_same(m_p.height(), m_p.width(), zeta_p.height(), zeta_p.width(), "loss_pcl");
  detail::check_same(m_p.height(), m_p.width(), zeta_pm.height(), zeta_pm.width(), "loss_pcl");
  const double n = static_cast<double>(m_p.size());
  PclTerm<Real> out{0.0, Plane<Real>(m_p.height(), m_p.width()),
                    Plane<Real>(m_p.height(), m_p.width())};
  double sum = 0.0;
  if (mode == PclMode::kLiteral) {
    for (std::size_t i = 0; i < m_p.size(); ++i) {
      const double d = static_cast<double>(zeta_p.data()[i]) - zeta_pm.data()[i];
      sum += d * d;
    }
  } else {
    for (std::size_t i = 0; i < m_p.size(); ++i) {
      const double d = static_cast<double>(m_p.data()[i]) - m_pm.data()[i];
      sum += d * d;
      out.grad_p.data()[i] = static_cast<Real>(2.0 * d / n);
      out.grad_pm.data()[i] = static_cast<Real>(-2.0 * d / n);
    }
  }
  out.value = sum / n;
  return out;
}

template <typename Real>
LossTerm<Real> loss_aux(const BasicSoftMask<Real>& m_raw) {
  return bce(m_raw, binarize(m_raw));
}

template <typename Real>
struct LossReport {
  double l_seg = 0.0;
  double l_mfp = 0.0;
  double l_pcl = 0.0;
  double l_pcl_literal = 0.0;
  double l_aux = 0.0;
  double l_total = 0.0;
  /// Per-term gradients, unweighted.
  Plane<Real> seg_grad_p;
  Plane<Real> mfp_grad_pm;
  Plane<Real> pcl_grad_p;
  Plane<Real> pcl_grad_pm;
  Plane<Real> aux_grad_p;
  /// Weighted sums: d l_total / d M_p and d l_total / d M_pm.
  Plane<Real> grad_p;
  Plane<Real> grad_pm;
};

template <typename Real>
struct BranchOutputs {
  const BasicSoftMask<Real>* m_p = nullptr;
  const BasicSoftMask<Real>* m_pm = nullptr;
  const BinaryMask* zeta_p = nullptr;
  const BinaryMask* zeta_pm = nullptr;
};

double weighted_total(const LossConfig& cfg, double l_seg, double l_mfp, double l_pcl,
                      double l_aux);

template <typename Real>
LossReport<Real> total_loss(const BranchOutputs<Real>& in, const LossConfig& cfg) {
  cfg.validate();
  const auto& m_p = *in.m_p;
  const auto& m_pm = *in.m_pm;
  const int h = m_p.height();
  const int w = m_p.width();
  LossReport<Real> r;
  r.seg_grad_p = r.mfp_grad_pm = r.pcl_grad_p = r.pcl_grad_pm = r.aux_grad_p = Plane<Real>(h, w);

  auto seg = loss_seg(m_p, *in.zeta_p);
  r.l_seg = seg.value;
  r.seg_grad_p = std::move(seg.grad);

  if (cfg.enable_mfp) {
    auto mfp = loss_mfp(m_pm, *in.zeta_pm);
    r.l_mfp = mfp.value;
    r.mfp_grad_pm = std::move(mfp.grad);
  }
  r.l_pcl_literal = loss_pcl(m_p, m_pm, *in.zeta_p, *in.zeta_pm, PclMode::kLiteral).value;
  if (cfg.enable_pcl) {
    auto pcl = loss_pcl(m_p, m_pm, *in.zeta_p, *in.zeta_pm, cfg.pcl_mode);
    r.l_pcl = pcl.value;
    r.pcl_grad_p = std::move(pcl.grad_p);
    r.pcl_grad_pm = std::move(pcl.grad_pm);
  }
  if (cfg.aux_weight > 0.0) {
    auto aux = loss_aux(m_p);
    r.l_aux = aux.value;
    r.aux_grad_p = std::move(aux.grad);
  }
  r.l_total = weighted_total(cfg, r.l_seg, r.l_mfp, r.l_pcl, r.l_aux);

  r.grad_p = Plane<Real>(h, w);
  r.grad_pm = Plane<Real>(h, w);
  for (std::size_t i = 0; i < m_p.size(); ++i) {
    r.grad_p.data()[i] = static_cast<Real>(cfg.alpha * r.seg_grad_p.data()[i] +
                                           static_cast<double>(r.pcl_grad_p.data()[i]) +
                                           cfg.aux_weight * r.aux_grad_p.data()[i]);
    r.grad_pm.data()[i] = static_cast<Real>(static_cast<double>(r.mfp_grad_pm.data()[i]) +
                                            r.pcl_grad_pm.data()[i]);
  }
  return r;
}

}  // namespace peekaboo
