#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dscd/objective.hpp"

namespace dscd {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;

  AdamState() = default;
  explicit AdamState(std::size_t dim) : m(dim, 0.0), v(dim, 0.0) {}

  void reset() {
    std::fill(m.begin(), m.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    t = 0;
  }
};

// Bias-corrected Adam update. A non-finite gradient rejects the step before
// any state is touched.
inline Position adam_step(AdamState& state, const Position& x, const Position& grad,
                          double lr, const AdamConfig& cfg = {}) {
  if (!(lr > 0.0)) throw std::invalid_argument("adam_step: lr must be positive");
  if (x.size() != grad.size() || x.size() != state.m.size())
    throw std::invalid_argument("adam_step: dimension mismatch");
  for (double g : grad)
    if (!std::isfinite(g)) throw std::invalid_argument("adam_step: non-finite gradient");

  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  Position out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    out[i] = x[i] - lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
  return out;
}

enum class LrKind { constant, linear };

struct LrSchedule {
  LrKind kind = LrKind::constant;
  double lr_start = 0.01;
  double lr_end = 0.01;
  long total_steps = 1;
};

inline LrSchedule constant_lr(double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("constant_lr: lr must be positive");
  return LrSchedule{LrKind::constant, lr, lr, 1};
}

inline LrSchedule linear_lr(double lr_start, double lr_end, long total_steps) {
  if (!(lr_start > 0.0) || !(lr_end > 0.0))
    throw std::invalid_argument("linear_lr: learning rates must be positive");
  if (total_steps < 1) throw std::invalid_argument("linear_lr: total_steps must be >= 1");
  return LrSchedule{LrKind::linear, lr_start, lr_end, total_steps};
}

inline double lr_at(const LrSchedule& schedule, long step) {
  if (!(schedule.lr_start > 0.0) || !(schedule.lr_end > 0.0))
    throw std::invalid_argument("lr_at: learning rates must be positive");
  if (schedule.kind == LrKind::constant) return schedule.lr_start;
  if (schedule.total_steps < 1) throw std::invalid_argument("lr_at: total_steps must be >= 1");
  if (step < 0 || step > schedule.total_steps) throw std::out_of_range("lr_at: step outside schedule");
  if (step == schedule.total_steps) return schedule.lr_end;  // endpoints are exact
  const double frac = static_cast<double>(step) / static_cast<double>(schedule.total_steps);
  return schedule.lr_start + (schedule.lr_end - schedule.lr_start) * frac;
}

}  // namespace dscd
