#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dscd/global.hpp"
#include "dscd/local.hpp"
#include "dscd/objective.hpp"
#include "dscd/proposal.hpp"
#include "dscd/rng.hpp"

namespace dscd {

enum class StepKind { local, global, uniform };

inline const char* step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::local: return "local";
    case StepKind::global: return "global";
    case StepKind::uniform: return "uniform";
  }
  return "?";
}

// Mode-switching bookkeeping. improved_last compares consecutive evaluated
// losses (strictly; a tie counts as non-improving), across mode boundaries.
struct AlternationState {
  StepKind mode = StepKind::local;
  long consecutive = 0;
  double last_loss = 0.0;
  bool improved_last = false;
};

inline constexpr long kNeverSwitch = std::numeric_limits<long>::max();

// Switch after T consecutive same-mode steps whose latest step did not
// improve. Both conditions must hold.
inline bool should_switch(const AlternationState& state, long t_threshold) {
  if (t_threshold < 1) throw std::invalid_argument("should_switch: T must be >= 1");
  return state.consecutive >= t_threshold && !state.improved_last;
}

// One record per objective evaluation. dimension is -1 except for global
// steps. `accepted` means the loss strictly improved the reference best at
// that point (window minimum for local/global, running best for uniform).
// `lr` is the learning rate used by a local step, 0 otherwise. `phi` is the
// concentration the proposal schedule stands at when the record is written.
struct TraceRecord {
  long eval_index = 0;
  StepKind kind = StepKind::local;
  int dimension = -1;
  double loss = 0.0;
  double best_so_far = 0.0;
  double window_best = 0.0;
  double phi = 0.0;
  bool accepted = false;
  double lr = 0.0;
};

struct RunTrace {
  std::vector<TraceRecord> records;
};

struct HybridConfig {
  long budget = 0;  // evaluations; 0 falls back to the objective's eval_budget
  long t_switch = 50;
  long window_capacity = 1000;
  StepKind initial_mode = StepKind::local;
  LrSchedule lr = constant_lr(0.01);
  AdamConfig adam;
  bool reset_moments_on_switch = false;
  double phi_cap = 0.999;
  std::optional<Position> initial;               // sampled uniformly if absent
  std::optional<ProposalDomain> proposal_domain; // objective box if absent
};

// Local optimisation with global backtracking. Budget is counted in objective
// evaluations: the initial evaluation is record 0, then one evaluation per
// step (gradient calls are not counted). In global mode the current position
// tracks x_best; in local mode Adam advances the current position and x_best
// picks up strict improvements. phi advances once per global step against a
// cosine schedule sized to the full budget, so it never exceeds phi_cap
// regardless of the local/global split. The learning-rate schedule is indexed
// by the number of local steps taken, over a budget-length horizon.
inline RunTrace run_hybrid(const Objective& obj, const HybridConfig& config, Rng& rng) {
  validate_objective(obj);
  if (config.budget < 0) throw std::invalid_argument("run_hybrid: budget must be >= 0");
  const long budget = config.budget > 0 ? config.budget : obj.eval_budget;
  if (budget < 1) throw std::invalid_argument("run_hybrid: budget must be >= 1");
  if (config.initial_mode == StepKind::uniform)
    throw std::invalid_argument("run_hybrid: initial mode must be local or global");

  const ProposalDomain domain =
      config.proposal_domain ? *config.proposal_domain : ProposalDomain::from_box(obj);
  if (static_cast<int>(domain.bounds.size()) != obj.dim)
    throw std::invalid_argument("run_hybrid: proposal domain dimension mismatch");

  const ConcentrationSchedule phi_schedule{budget, config.phi_cap};
  LrSchedule lr_schedule = config.lr;
  if (lr_schedule.kind == LrKind::linear) lr_schedule.total_steps = budget;

  Position x0 = config.initial ? *config.initial : sample_uniform_position(obj, rng);
  DscdState state = make_dscd_state(obj, std::move(x0), static_cast<std::size_t>(config.window_capacity));

  RunTrace trace;
  trace.records.reserve(static_cast<std::size_t>(budget));

  const double y0 = state.y_best;
  double best_so_far = y0;
  long n_global = 0;
  long n_local = 0;

  AlternationState alt{config.initial_mode, 0, y0, false};
  AdamState adam(static_cast<std::size_t>(obj.dim));
  Position x_cur = state.x_best;

  const double lr0 = alt.mode == StepKind::local ? lr_at(lr_schedule, 0) : 0.0;
  trace.records.push_back({0, alt.mode, -1, y0, y0, state.window.best(), phi_at(phi_schedule, 0), true, lr0});

  for (long eval = 1; eval < budget; ++eval) {
    TraceRecord rec;
    rec.eval_index = eval;
    rec.kind = alt.mode;

    if (alt.mode == StepKind::local) {
      const double lr = lr_at(lr_schedule, std::min(n_local, lr_schedule.total_steps));
      const Position g = gradient(obj, x_cur);
      x_cur = adam_step(adam, x_cur, g, lr, config.adam);
      ++n_local;
      rec.loss = evaluate(obj, x_cur);
      rec.lr = lr;

      const double pre = state.window.best();
      state.window.push(rec.loss);
      rec.accepted = std::isfinite(rec.loss) && rec.loss < pre;
      if (rec.accepted) state.x_best = x_cur;
      state.y_best = state.window.best();
      rec.phi = phi_at(phi_schedule, n_global);
    } else {
      state.phi = phi_at(phi_schedule, n_global);
      const DscdStep step = dscd_step(state, obj, domain, rng);
      ++n_global;
      rec.dimension = step.dimension;
      rec.loss = step.loss;
      rec.accepted = step.accepted;
      rec.phi = state.phi;
      x_cur = state.x_best;
    }

    if (std::isfinite(rec.loss) && rec.loss < best_so_far) best_so_far = rec.loss;
    rec.best_so_far = best_so_far;
    rec.window_best = state.window.best();

    alt.improved_last = rec.loss < alt.last_loss;
    alt.last_loss = rec.loss;
    alt.consecutive += 1;
    trace.records.push_back(rec);

    if (config.t_switch != kNeverSwitch && should_switch(alt, config.t_switch)) {
      alt.mode = alt.mode == StepKind::local ? StepKind::global : StepKind::local;
      alt.consecutive = 0;
      if (alt.mode == StepKind::local) {
        x_cur = state.x_best;
        if (config.reset_moments_on_switch) adam.reset();
      }
    }
  }
  return trace;
}

// Reference baseline: budget independent uniform samples; the trace records
// the running best.
inline RunTrace run_baseline_uniform(const Objective& obj, long budget, Rng& rng) {
  validate_objective(obj);
  if (budget < 1) throw std::invalid_argument("run_baseline_uniform: budget must be >= 1");

  RunTrace trace;
  trace.records.reserve(static_cast<std::size_t>(budget));
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < budget; ++i) {
    const Position x = sample_uniform_position(obj, rng);
    const double y = evaluate(obj, x);
    const bool improved = std::isfinite(y) && y < best;
    if (improved) best = y;
    trace.records.push_back({i, StepKind::uniform, -1, y, best, best, 0.0, improved || i == 0, 0.0});
  }
  return trace;
}

}  // namespace dscd
