// Copyright 2026 The Peekaboo Authors
// SPDX-License-Identifier: Apache-2.0

#include "peekaboo/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace peekaboo {

AdamState AdamState::for_size(std::size_t n, double lr, double beta1, double beta2, double eps) {
  AdamState s;
  s.m.assign(n, 0.0);
  s.v.assign(n, 0.0);
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  return s;
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads,
               double step_lr) {
  if (params.size() != grads.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ShapeError("adam_step: parameter, gradient and moment sizes differ");
  }
  const double lr = step_lr < 0.0 ? state.lr : step_lr;
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

void adam_step(AdamState& state, DecoderParams& params, const DecoderGrads& grads,
               double step_lr) {
  std::vector<double> flat = params.flatten();
  const std::vector<double> g = grads.flatten();
  adam_step(state, flat, g, step_lr);
  params.assign(flat);
}

ScheduleKind parse_schedule(std::string_view text) {
  if (text == "cosine") return ScheduleKind::kCosine;
  if (text == "constant") return ScheduleKind::kConstant;
  throw InvalidArgument("unknown learning-rate schedule '" + std::string(text) + "'");
}

std::string_view to_string(ScheduleKind kind) {
  return kind == ScheduleKind::kCosine ? "cosine" : "constant";
}

double LrSchedule::at(std::int64_t step) const {
  if (kind == ScheduleKind::kConstant || total_steps <= 1) return base_lr;
  const double t = std::clamp(static_cast<double>(step) / static_cast<double>(total_steps - 1),
                              0.0, 1.0);
  const double floor = final_fraction * base_lr;
  return floor + 0.5 * (base_lr - floor) * (1.0 + std::cos(std::numbers::pi * t));
}

}  // namespace peekaboo
