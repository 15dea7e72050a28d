#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dscd/global.hpp"
#include "dscd/hybrid.hpp"
#include "dscd/local.hpp"
#include "dscd/proposal.hpp"
#include "dscd/rng.hpp"

namespace dscd {

// Toy differentiable architecture search problem: two stacked cells ("normal"
// then "reduction") over the same DAG, scalar node values, and a candidate
// set of three operations per edge. Small enough that every gradient can be
// checked against central finite differences.

inline double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

enum class MixKind { sigmoid, softmax };

inline constexpr int kOpLinear = 0;  // w_e * x, one learnable weight per edge
inline constexpr int kOpSkip = 1;    // x
inline constexpr int kOpZero = 2;    // 0; carries no activations
inline constexpr int kOpsPerEdge = 3;

inline constexpr int kGroupNormal = 0;
inline constexpr int kGroupReduction = 1;
inline constexpr std::array<const char*, 2> kGroupNames = {"normal", "reduction"};

// DAG of `nodes` nodes: 0 and 1 are cell inputs, the last node is the cell
// output, x_j = sum over edges (i, j) of the mixed operation applied to x_i.
struct CellStructure {
  int nodes = 4;
  std::vector<std::pair<int, int>> edges = {{0, 2}, {1, 2}, {0, 3}, {2, 3}};

  int edge_count() const { return static_cast<int>(edges.size()); }
  int alpha_count() const { return edge_count() * kOpsPerEdge; }
};

inline void validate_structure(const CellStructure& s) {
  if (s.nodes < 3) throw std::invalid_argument("CellStructure: need at least 3 nodes");
  if (s.edges.empty()) throw std::invalid_argument("CellStructure: need at least one edge");
  for (auto [i, j] : s.edges)
    if (i < 0 || j >= s.nodes || i >= j || j < 2)
      throw std::invalid_argument("CellStructure: edge must satisfy 0 <= i < j, j >= 2");
}

struct ToyCell {
  CellStructure structure;
  MixKind mix = MixKind::sigmoid;
  std::array<std::vector<double>, 2> alpha;  // per group, [edge * 3 + op]
  std::array<std::vector<double>, 2> w;      // per group, one weight per edge

  int alpha_total() const { return 2 * structure.alpha_count(); }
  int w_total() const { return 2 * structure.edge_count(); }
};

inline ToyCell make_toy_cell(CellStructure structure = {}, MixKind mix = MixKind::sigmoid) {
  validate_structure(structure);
  ToyCell cell;
  cell.structure = std::move(structure);
  cell.mix = mix;
  for (int g = 0; g < 2; ++g) {
    cell.alpha[g].assign(cell.structure.alpha_count(), 0.0);
    cell.w[g].assign(cell.structure.edge_count(), 0.0);
  }
  return cell;
}

inline std::vector<double> alpha_flat(const ToyCell& cell) {
  std::vector<double> out = cell.alpha[0];
  out.insert(out.end(), cell.alpha[1].begin(), cell.alpha[1].end());
  return out;
}

inline void set_alpha_flat(ToyCell& cell, const std::vector<double>& flat) {
  const std::size_t per = cell.alpha[0].size();
  if (flat.size() != 2 * per) throw std::invalid_argument("set_alpha_flat: size mismatch");
  std::copy(flat.begin(), flat.begin() + per, cell.alpha[0].begin());
  std::copy(flat.begin() + per, flat.end(), cell.alpha[1].begin());
}

inline std::vector<double> w_flat(const ToyCell& cell) {
  std::vector<double> out = cell.w[0];
  out.insert(out.end(), cell.w[1].begin(), cell.w[1].end());
  return out;
}

inline void set_w_flat(ToyCell& cell, const std::vector<double>& flat) {
  const std::size_t per = cell.w[0].size();
  if (flat.size() != 2 * per) throw std::invalid_argument("set_w_flat: size mismatch");
  std::copy(flat.begin(), flat.begin() + per, cell.w[0].begin());
  std::copy(flat.begin() + per, flat.end(), cell.w[1].begin());
}

inline std::array<double, kOpsPerEdge> softmax3(const double* a) {
  const double mx = std::max(a[0], std::max(a[1], a[2]));
  std::array<double, kOpsPerEdge> e{std::exp(a[0] - mx), std::exp(a[1] - mx), std::exp(a[2] - mx)};
  const double s = e[0] + e[1] + e[2];
  return {e[0] / s, e[1] / s, e[2] / s};
}

inline std::array<double, kOpsPerEdge> edge_mix_weights(MixKind mix, const double* alpha_edge) {
  if (mix == MixKind::sigmoid)
    return {sigmoid(alpha_edge[0]), sigmoid(alpha_edge[1]), sigmoid(alpha_edge[2])};
  return softmax3(alpha_edge);
}

// Generic mixed-edge outputs (vector-valued operations), one mixing weight per
// operation output.
inline std::vector<double> mixed_edge_sigmoid(const std::vector<double>& alpha_edge,
                                              const std::vector<std::vector<double>>& op_outputs) {
  if (alpha_edge.size() != op_outputs.size())
    throw std::invalid_argument("mixed_edge_sigmoid: one alpha per op output required");
  if (op_outputs.empty()) throw std::invalid_argument("mixed_edge_sigmoid: no operations");
  const std::size_t len = op_outputs.front().size();
  std::vector<double> out(len, 0.0);
  for (std::size_t o = 0; o < op_outputs.size(); ++o) {
    if (op_outputs[o].size() != len)
      throw std::invalid_argument("mixed_edge_sigmoid: op output length mismatch");
    const double m = sigmoid(alpha_edge[o]);
    for (std::size_t t = 0; t < len; ++t) out[t] += m * op_outputs[o][t];
  }
  return out;
}

inline std::vector<double> mixed_edge_softmax(const std::vector<double>& alpha_edge,
                                              const std::vector<std::vector<double>>& op_outputs) {
  if (alpha_edge.size() != op_outputs.size())
    throw std::invalid_argument("mixed_edge_softmax: one alpha per op output required");
  if (op_outputs.empty()) throw std::invalid_argument("mixed_edge_softmax: no operations");
  const double mx = *std::max_element(alpha_edge.begin(), alpha_edge.end());
  std::vector<double> weights(alpha_edge.size());
  double sum = 0.0;
  for (std::size_t o = 0; o < alpha_edge.size(); ++o) {
    weights[o] = std::exp(alpha_edge[o] - mx);
    sum += weights[o];
  }
  const std::size_t len = op_outputs.front().size();
  std::vector<double> out(len, 0.0);
  for (std::size_t o = 0; o < op_outputs.size(); ++o) {
    if (op_outputs[o].size() != len)
      throw std::invalid_argument("mixed_edge_softmax: op output length mismatch");
    const double m = weights[o] / sum;
    for (std::size_t t = 0; t < len; ++t) out[t] += m * op_outputs[o][t];
  }
  return out;
}

// Scalar forward through one cell group; node values are cached for backprop.
inline double group_forward(const ToyCell& cell, int group, double in0, double in1,
                            std::vector<double>& nodes) {
  const CellStructure& s = cell.structure;
  nodes.assign(s.nodes, 0.0);
  nodes[0] = in0;
  nodes[1] = in1;
  for (int j = 2; j < s.nodes; ++j) {
    for (int e = 0; e < s.edge_count(); ++e) {
      if (s.edges[e].second != j) continue;
      const double x = nodes[s.edges[e].first];
      const auto m = edge_mix_weights(cell.mix, &cell.alpha[group][e * kOpsPerEdge]);
      nodes[j] += m[kOpLinear] * (cell.w[group][e] * x) + m[kOpSkip] * x;
    }
  }
  return nodes[s.nodes - 1];
}

struct CellGrads {
  std::array<std::vector<double>, 2> alpha;
  std::array<std::vector<double>, 2> w;
};

inline CellGrads zero_grads(const ToyCell& cell) {
  CellGrads g;
  for (int k = 0; k < 2; ++k) {
    g.alpha[k].assign(cell.structure.alpha_count(), 0.0);
    g.w[k].assign(cell.structure.edge_count(), 0.0);
  }
  return g;
}

// Reverse pass through one group. `upstream` is dL/d(cell output); returns
// the adjoints of the two input nodes through d_in0/d_in1.
inline void group_backward(const ToyCell& cell, int group, const std::vector<double>& nodes,
                           double upstream, CellGrads& grads, double& d_in0, double& d_in1) {
  const CellStructure& s = cell.structure;
  std::vector<double> adj(s.nodes, 0.0);
  adj[s.nodes - 1] = upstream;
  for (int j = s.nodes - 1; j >= 2; --j) {
    const double a = adj[j];
    for (int e = 0; e < s.edge_count(); ++e) {
      if (s.edges[e].second != j) continue;
      const double x = nodes[s.edges[e].first];
      const double we = cell.w[group][e];
      const double* ae = &cell.alpha[group][e * kOpsPerEdge];
      const auto m = edge_mix_weights(cell.mix, ae);
      if (cell.mix == MixKind::sigmoid) {
        grads.alpha[group][e * kOpsPerEdge + kOpLinear] +=
            a * m[kOpLinear] * (1.0 - m[kOpLinear]) * (we * x);
        grads.alpha[group][e * kOpsPerEdge + kOpSkip] += a * m[kOpSkip] * (1.0 - m[kOpSkip]) * x;
        // zero op output is identically 0: no alpha gradient
      } else {
        const std::array<double, kOpsPerEdge> o{we * x, x, 0.0};
        const double val = m[0] * o[0] + m[1] * o[1] + m[2] * o[2];
        for (int k = 0; k < kOpsPerEdge; ++k)
          grads.alpha[group][e * kOpsPerEdge + k] += a * m[k] * (o[k] - val);
      }
      grads.w[group][e] += a * m[kOpLinear] * x;
      adj[s.edges[e].first] += a * (m[kOpLinear] * we + m[kOpSkip]);
    }
  }
  d_in0 = adj[0];
  d_in1 = adj[1];
}

// Model: normal cell on (u, u), then reduction cell on (normal output, u).
inline double model_forward(const ToyCell& cell, double u, std::vector<double>& nodes_normal,
                            std::vector<double>& nodes_reduction) {
  const double h = group_forward(cell, kGroupNormal, u, u, nodes_normal);
  return group_forward(cell, kGroupReduction, h, u, nodes_reduction);
}

inline double model_forward(const ToyCell& cell, double u) {
  std::vector<double> n0, n1;
  return model_forward(cell, u, n0, n1);
}

struct Sample {
  double input = 0.0;
  double target = 0.0;
};

struct SplitData {
  std::vector<Sample> train;
  std::vector<Sample> val;
};

// Mean squared error over one split.
inline double split_mse(const ToyCell& cell, const std::vector<Sample>& samples) {
  if (samples.empty()) throw std::invalid_argument("split_mse: empty split");
  double s = 0.0;
  for (const Sample& sm : samples) {
    const double r = model_forward(cell, sm.input) - sm.target;
    s += r * r;
  }
  return s / static_cast<double>(samples.size());
}

inline double train_loss(const ToyCell& cell, const SplitData& data) { return split_mse(cell, data.train); }
inline double val_loss(const ToyCell& cell, const SplitData& data) { return split_mse(cell, data.val); }

// Full analytic gradient of a split's MSE with respect to alpha and w.
inline CellGrads split_mse_gradients(const ToyCell& cell, const std::vector<Sample>& samples) {
  if (samples.empty()) throw std::invalid_argument("split_mse_gradients: empty split");
  CellGrads grads = zero_grads(cell);
  std::vector<double> nodes_n, nodes_r;
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (const Sample& sm : samples) {
    const double y = model_forward(cell, sm.input, nodes_n, nodes_r);
    const double e = 2.0 * (y - sm.target) * inv_n;
    double dh = 0.0, du_r = 0.0;
    group_backward(cell, kGroupReduction, nodes_r, e, grads, dh, du_r);
    double du0 = 0.0, du1 = 0.0;
    group_backward(cell, kGroupNormal, nodes_n, dh, grads, du0, du1);
  }
  return grads;
}

inline std::vector<double> flat_alpha_grads(const CellGrads& g) {
  std::vector<double> out = g.alpha[0];
  out.insert(out.end(), g.alpha[1].begin(), g.alpha[1].end());
  return out;
}

inline std::vector<double> flat_w_grads(const CellGrads& g) {
  std::vector<double> out = g.w[0];
  out.insert(out.end(), g.w[1].begin(), g.w[1].end());
  return out;
}

inline std::vector<double> weight_grad_train(const ToyCell& cell, const SplitData& data) {
  return flat_w_grads(split_mse_gradients(cell, data.train));
}

inline std::vector<double> arch_grad_val(const ToyCell& cell, const SplitData& data) {
  return flat_alpha_grads(split_mse_gradients(cell, data.val));
}

// Architecture gradient g_alpha(xi) = d/d_alpha L_val(alpha, w - xi * grad_w
// L_train(alpha, w)). xi = 0 collapses to the plain analytic gradient of the
// validation loss; xi > 0 is evaluated by central finite differences over
// alpha of the composed map, which is exact enough at this dimensionality.
inline std::vector<double> darts_arch_grad(const ToyCell& cell, const SplitData& data, double xi,
                                           double fd_step = 1e-5) {
  if (xi < 0.0) throw std::invalid_argument("darts_arch_grad: xi must be >= 0");
  if (xi == 0.0) return arch_grad_val(cell, data);

  const auto composed = [&](const std::vector<double>& alpha) {
    ToyCell c = cell;
    set_alpha_flat(c, alpha);
    const std::vector<double> gw = weight_grad_train(c, data);
    std::vector<double> w = w_flat(c);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= xi * gw[i];
    set_w_flat(c, w);
    return val_loss(c, data);
  };

  std::vector<double> alpha = alpha_flat(cell);
  std::vector<double> g(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double saved = alpha[i];
    alpha[i] = saved + fd_step;
    const double fp = composed(alpha);
    alpha[i] = saved - fd_step;
    const double fm = composed(alpha);
    alpha[i] = saved;
    g[i] = (fp - fm) / (2.0 * fd_step);
  }
  return g;
}

// One alternating search step: alpha moves first on the approximate
// architecture gradient, then w moves on the training gradient at the updated
// alpha.
inline ToyCell darts_alternating_step(const ToyCell& cell, const SplitData& data, double lr_alpha,
                                      double lr_w, double xi) {
  if (!(lr_alpha > 0.0) || !(lr_w > 0.0))
    throw std::invalid_argument("darts_alternating_step: learning rates must be positive");

  ToyCell next = cell;
  const std::vector<double> ga = darts_arch_grad(cell, data, xi);
  std::vector<double> alpha = alpha_flat(cell);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    alpha[i] -= lr_alpha * ga[i];
    if (!std::isfinite(alpha[i]))
      throw std::runtime_error("darts_alternating_step: non-finite alpha at index " + std::to_string(i));
  }
  set_alpha_flat(next, alpha);

  const std::vector<double> gw = weight_grad_train(next, data);
  std::vector<double> w = w_flat(next);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] -= lr_w * gw[i];
    if (!std::isfinite(w[i]))
      throw std::runtime_error("darts_alternating_step: non-finite weight at index " + std::to_string(i));
  }
  set_w_flat(next, w);
  return next;
}

// Keep an edge-op iff sigmoid(alpha) exceeds the threshold (strictly).
inline std::vector<char> discretize(const std::vector<double>& alpha, double threshold = 0.85) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("discretize: threshold must lie in (0, 1)");
  std::vector<char> mask(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) mask[i] = sigmoid(alpha[i]) > threshold ? 1 : 0;
  return mask;
}

struct ValidityResult {
  bool valid = true;
  std::vector<std::string> invalid_groups;
};

// A group is invalid when no input-to-output path of activation-carrying
// edge-ops survives discretisation. The zero op never carries activations,
// so it does not count toward connectivity.
inline ValidityResult validity_check(const std::array<std::vector<char>, 2>& masks,
                                     const CellStructure& structure) {
  validate_structure(structure);
  ValidityResult result;
  for (int g = 0; g < 2; ++g) {
    if (static_cast<int>(masks[g].size()) != structure.alpha_count())
      throw std::invalid_argument("validity_check: mask size mismatch");
    std::vector<char> reachable(structure.nodes, 0);
    reachable[0] = reachable[1] = 1;
    for (int j = 2; j < structure.nodes; ++j) {
      for (int e = 0; e < structure.edge_count(); ++e) {
        if (structure.edges[e].second != j) continue;
        const bool carries = masks[g][e * kOpsPerEdge + kOpLinear] || masks[g][e * kOpsPerEdge + kOpSkip];
        if (carries && reachable[structure.edges[e].first]) reachable[j] = 1;
      }
    }
    if (!reachable[structure.nodes - 1]) {
      result.valid = false;
      result.invalid_groups.emplace_back(kGroupNames[g]);
    }
  }
  return result;
}

inline std::array<std::vector<char>, 2> cell_masks(const ToyCell& cell, double threshold = 0.85) {
  return {discretize(cell.alpha[0], threshold), discretize(cell.alpha[1], threshold)};
}

// Mean of sigmoid(alpha) per group of a partition of the alpha vector.
inline std::vector<double> mean_group_weights(const std::vector<double>& alpha,
                                              const std::vector<std::vector<int>>& grouping) {
  std::vector<char> seen(alpha.size(), 0);
  std::vector<double> means;
  means.reserve(grouping.size());
  for (const auto& group : grouping) {
    if (group.empty()) throw std::invalid_argument("mean_group_weights: empty group");
    double s = 0.0;
    for (int idx : group) {
      if (idx < 0 || idx >= static_cast<int>(alpha.size()) || seen[idx])
        throw std::invalid_argument("mean_group_weights: grouping must partition alpha");
      seen[idx] = 1;
      s += sigmoid(alpha[idx]);
    }
    means.push_back(s / static_cast<double>(group.size()));
  }
  for (char c : seen)
    if (!c) throw std::invalid_argument("mean_group_weights: grouping must partition alpha");
  return means;
}

inline std::array<double, 2> group_means(const ToyCell& cell) {
  std::array<double, 2> out{0.0, 0.0};
  for (int g = 0; g < 2; ++g) {
    double s = 0.0;
    for (double a : cell.alpha[g]) s += sigmoid(a);
    out[g] = s / static_cast<double>(cell.alpha[g].size());
  }
  return out;
}

// Data-generating reference architecture: a fixed cell whose targets the
// search can recover. Normal cell: edge (0,2) linear, (1,2) skip, (0,3) off,
// (2,3) linear. Reduction cell: (0,2) skip, (1,2) linear, (0,3) linear,
// (2,3) skip.
inline ToyCell reference_cell(MixKind mix = MixKind::sigmoid) {
  ToyCell cell = make_toy_cell({}, mix);
  const double on = 3.0, off = -3.0;
  cell.alpha[kGroupNormal] = {on, off, off, off, on, off, off, off, off, on, off, off};
  cell.alpha[kGroupReduction] = {off, on, off, on, off, off, on, off, off, off, on, off};
  cell.w[kGroupNormal] = {1.3, -0.7, 0.5, 0.8};
  cell.w[kGroupReduction] = {0.9, -1.1, 0.6, 1.4};
  return cell;
}

// Disjoint train/validation splits with inputs uniform on [-1, 1] and targets
// from the reference cell. Regeneration with the same seed is identical.
inline SplitData make_split_data(int n_train, int n_val, std::uint64_t seed,
                                 MixKind mix = MixKind::sigmoid) {
  if (n_train < 1 || n_val < 1) throw std::invalid_argument("make_split_data: splits must be non-empty");
  const ToyCell truth = reference_cell(mix);
  Rng rng(seed);
  SplitData data;
  data.train.reserve(n_train);
  data.val.reserve(n_val);
  for (int i = 0; i < n_train; ++i) {
    const double u = rng.uniform(-1.0, 1.0);
    data.train.push_back({u, model_forward(truth, u)});
  }
  for (int i = 0; i < n_val; ++i) {
    const double u = rng.uniform(-1.0, 1.0);
    data.val.push_back({u, model_forward(truth, u)});
  }
  return data;
}

struct ToySearchConfig {
  long budget = 2000;  // alpha steps; one validation-loss evaluation each
  long t_switch = 50;
  long window_capacity = 1000;
  MixKind mix = MixKind::sigmoid;
  double xi = 0.0;
  double lr_alpha = 0.025;
  double lr_w = 0.05;
  int n_train = 64;
  int n_val = 64;
  std::uint64_t data_seed = 1;
  long checkpoint_every = 100;
  double threshold = 0.85;
  double phi_cap = 0.999;
  double proposal_half_width = 3.0;
  double w_init_half_width = 0.5;
};

struct SearchCheckpoint {
  long step = 0;
  std::array<double, 2> group_means{0.0, 0.0};
  bool valid_after_discretization = true;
};

struct ToySearchResult {
  RunTrace trace;
  std::vector<SearchCheckpoint> checkpoints;
  ToyCell final_cell;
};

// Runs the toy architecture search: alpha follows the hybrid local/global
// scheme (Adam on the approximate architecture gradient, DSCD proposals over
// [-half_width, half_width]); after every alpha step w takes one Adam step on
// the training loss. The loss stream feeding the window and the alternation
// state is the validation loss, re-evaluated under the drifting w.
inline ToySearchResult run_toy_search(const ToySearchConfig& config, Rng& rng) {
  if (config.budget < 1) throw std::invalid_argument("run_toy_search: budget must be >= 1");
  if (config.checkpoint_every < 1)
    throw std::invalid_argument("run_toy_search: checkpoint_every must be >= 1");

  const SplitData data = make_split_data(config.n_train, config.n_val, config.data_seed, config.mix);

  ToyCell cell = make_toy_cell({}, config.mix);
  {
    std::vector<double> w(cell.w_total());
    for (double& wi : w) wi = rng.uniform(-config.w_init_half_width, config.w_init_half_width);
    set_w_flat(cell, w);
  }

  const int n_alpha = cell.alpha_total();
  const ProposalDomain domain = ProposalDomain::symmetric(config.proposal_half_width, n_alpha);
  const ConcentrationSchedule phi_schedule{config.budget, config.phi_cap};
  LossWindow window(static_cast<std::size_t>(config.window_capacity));

  const auto checkpoint_of = [&](long step) {
    const ValidityResult validity = validity_check(cell_masks(cell, config.threshold), cell.structure);
    return SearchCheckpoint{step, group_means(cell), validity.valid};
  };

  ToySearchResult result;
  result.trace.records.reserve(static_cast<std::size_t>(config.budget));

  const double y0 = val_loss(cell, data);
  window.push(y0);
  double best_so_far = y0;
  long n_global = 0;

  std::vector<double> alpha_best = alpha_flat(cell);
  AlternationState alt{StepKind::local, 0, y0, false};
  AdamState adam_alpha(static_cast<std::size_t>(n_alpha));
  AdamState adam_w(static_cast<std::size_t>(cell.w_total()));

  result.trace.records.push_back({0, alt.mode, -1, y0, y0, window.best(), 0.0, true, config.lr_alpha});
  result.checkpoints.push_back(checkpoint_of(0));

  for (long step = 1; step < config.budget; ++step) {
    TraceRecord rec;
    rec.eval_index = step;
    rec.kind = alt.mode;

    if (alt.mode == StepKind::local) {
      const std::vector<double> ga = darts_arch_grad(cell, data, config.xi);
      const std::vector<double> next = adam_step(adam_alpha, alpha_flat(cell), ga, config.lr_alpha);
      set_alpha_flat(cell, next);
      rec.loss = val_loss(cell, data);
      rec.lr = config.lr_alpha;
      const double pre = window.best();
      window.push(rec.loss);
      rec.accepted = std::isfinite(rec.loss) && rec.loss < pre;
      if (rec.accepted) alpha_best = next;
      rec.phi = phi_at(phi_schedule, n_global);
    } else {
      const double phi = phi_at(phi_schedule, n_global);
      const int d = rng.below_int(n_alpha);
      std::vector<double> candidate = alpha_best;
      candidate[d] = sample_proposal(alpha_best[d], d, domain, phi, rng);
      set_alpha_flat(cell, candidate);
      rec.loss = val_loss(cell, data);
      rec.dimension = d;
      rec.phi = phi;
      const double pre = window.best();
      window.push(rec.loss);
      rec.accepted = std::isfinite(rec.loss) && rec.loss < pre;
      if (rec.accepted) alpha_best = std::move(candidate);
      set_alpha_flat(cell, alpha_best);  // current position tracks the best
      ++n_global;
    }

    const std::vector<double> gw = weight_grad_train(cell, data);
    set_w_flat(cell, adam_step(adam_w, w_flat(cell), gw, config.lr_w));

    if (std::isfinite(rec.loss) && rec.loss < best_so_far) best_so_far = rec.loss;
    rec.best_so_far = best_so_far;
    rec.window_best = window.best();

    alt.improved_last = rec.loss < alt.last_loss;
    alt.last_loss = rec.loss;
    alt.consecutive += 1;
    result.trace.records.push_back(rec);

    if (step % config.checkpoint_every == 0 || step == config.budget - 1)
      result.checkpoints.push_back(checkpoint_of(step));

    if (config.t_switch != kNeverSwitch && should_switch(alt, config.t_switch)) {
      alt.mode = alt.mode == StepKind::local ? StepKind::global : StepKind::local;
      alt.consecutive = 0;
      if (alt.mode == StepKind::local) set_alpha_flat(cell, alpha_best);
    }
  }

  result.final_cell = cell;
  return result;
}

}  // namespace dscd
