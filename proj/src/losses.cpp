// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/losses.hpp"

namespace peekaboo {

PclMode parse_pcl_mode(std::string_view text) {
  if (text == "soft") return PclMode::kSoft;
  if (text == "literal") return PclMode::kLiteral;
  throw InvalidArgument("unknown pcl mode '" + std::string(text) + "'");
}

std::string_view to_string(PclMode mode) { return mode == PclMode::kSoft ? "soft" : "literal"; }

void LossConfig::validate() const {
  if (!(alpha >= 0.0)) throw InvalidArgument("loss alpha must be >= 0");
  if (!(aux_weight >= 0.0)) throw InvalidArgument("loss aux_weight must be >= 0");
}

double weighted_total(const LossConfig& cfg, double l_seg, double l_mfp, double l_pcl,
                      double l_aux) {
  return cfg.alpha * l_seg + (cfg.enable_mfp ? l_mfp : 0.0) + (cfg.enable_pcl ? l_pcl : 0.0) +
         cfg.aux_weight * l_aux;
}

}  // namespace peekaboo
