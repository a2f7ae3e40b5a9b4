// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peekaboo/head.hpp"

namespace peekaboo {

struct AdamState {
  std::int64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
  double lr = 5e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_size(std::size_t n, double lr = 5e-2, double beta1 = 0.9,
                            double beta2 = 0.999, double eps = 1e-8);
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// One bias-corrected Adam update in place. step_lr overrides state.lr for
/// this step (learning-rate schedules); pass a negative value to use state.lr.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double step_lr = -1.0);
void adam_step(AdamState& state, DecoderParams& params, const DecoderGrads& grads,
               double step_lr = -1.0);

enum class ScheduleKind { kConstant, kCosine };

ScheduleKind parse_schedule(std::string_view text);
std::string_view to_string(ScheduleKind kind);

/// Cosine decay from base_lr to final_fraction * base_lr over total_steps.
struct LrSchedule {
  ScheduleKind kind = ScheduleKind::kCosine;
  double base_lr = 5e-2;
  double final_fraction = 0.1;
  std::int64_t total_steps = 500;

  double at(std::int64_t step) const;
};

}  // namespace peekaboo
