#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>

#include "dscd/objective.hpp"
#include "dscd/proposal.hpp"
#include "dscd/rng.hpp"

namespace dscd {

// Ring buffer of the last K observed losses with an O(1) minimum query
// (monotone deque). Non-finite values are ignored on push so a single NaN
// cannot poison the minimum.
class LossWindow {
 public:
  explicit LossWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw std::invalid_argument("LossWindow: capacity must be >= 1");
  }

  void push(double loss) {
    if (!std::isfinite(loss)) return;
    ++seq_;
    entries_.push_back({seq_, loss});
    while (!minq_.empty() && minq_.back().value >= loss) minq_.pop_back();
    minq_.push_back({seq_, loss});
    if (entries_.size() > capacity_) {
      const Entry evicted = entries_.front();
      entries_.pop_front();
      if (minq_.front().seq == evicted.seq) minq_.pop_front();
    }
  }

  double best() const {
    if (entries_.empty()) throw std::logic_error("LossWindow: best() on empty window");
    return minq_.front().value;
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }

 private:
  struct Entry {
    std::uint64_t seq;
    double value;
  };
  std::size_t capacity_;
  std::uint64_t seq_ = 0;
  std::deque<Entry> entries_;
  std::deque<Entry> minq_;
};

inline double window_best(const LossWindow& window) { return window.best(); }

struct DscdStep {
  int dimension = -1;
  double proposed = 0.0;
  double loss = 0.0;
  bool accepted = false;
  double window_best_before = 0.0;
};

// State of a doubly stochastic coordinate descent run. y_best follows window
// semantics: it equals the window minimum after every step, so it can rise
// once good losses age out. x_best is only ever replaced by an accepted
// proposal.
struct DscdState {
  Position x_best;
  double y_best = 0.0;
  LossWindow window;
  double phi = 0.0;
};

// Evaluates the initial position; that evaluation seeds the window.
inline DscdState make_dscd_state(const Objective& obj, Position x0, std::size_t window_capacity) {
  DscdState state{std::move(x0), 0.0, LossWindow(window_capacity), 0.0};
  const double y0 = evaluate(obj, state.x_best);
  state.window.push(y0);
  state.y_best = state.window.empty() ? y0 : state.window.best();
  return state;
}

// One DSCD step: sample a dimension uniformly, replace that coordinate of
// x_best with an annealed Beta proposal, and accept only on strict
// improvement over the window minimum taken before the new loss is pushed.
// A non-finite loss is recorded but never accepted and never enters the
// window.
inline DscdStep dscd_step(DscdState& state, const Objective& obj, const ProposalDomain& domain,
                          Rng& rng) {
  if (static_cast<int>(state.x_best.size()) != obj.dim)
    throw std::invalid_argument("dscd_step: state dimension mismatch");
  if (state.window.empty()) throw std::logic_error("dscd_step: window is empty (state not initialized)");

  DscdStep rec;
  rec.dimension = rng.below_int(obj.dim);
  rec.proposed = sample_proposal(state.x_best[rec.dimension], rec.dimension, domain, state.phi, rng);

  Position candidate = state.x_best;
  candidate[rec.dimension] = rec.proposed;
  rec.loss = evaluate(obj, candidate);
  rec.window_best_before = state.window.best();

  state.window.push(rec.loss);
  rec.accepted = std::isfinite(rec.loss) && rec.loss < rec.window_best_before;
  if (rec.accepted) state.x_best = std::move(candidate);
  state.y_best = state.window.best();
  return rec;
}

}  // namespace dscd
