#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dscd/objective.hpp"
#include "dscd/rng.hpp"

namespace dscd {

// Per-dimension box the proposals are drawn from. For architecture weights
// the conventional choice is [-3, 3]; for benchmark objectives it is the
// objective's own box.
struct ProposalDomain {
  std::vector<Interval> bounds;

  static ProposalDomain from_box(const Objective& obj) { return ProposalDomain{obj.domain}; }

  static ProposalDomain symmetric(double half_width, int dim) {
    if (!(half_width > 0.0)) throw std::invalid_argument("ProposalDomain: half_width must be positive");
    return ProposalDomain{std::vector<Interval>(dim, Interval{-half_width, half_width})};
  }
};

// Cosine ramp for the concentration parameter phi: 0 at step 0, rising to 1
// at total_steps, capped at phi_cap so the proposal never degenerates to a
// Dirac.
struct ConcentrationSchedule {
  long total_steps = 1;
  double phi_cap = 0.999;
};

inline double phi_at(const ConcentrationSchedule& schedule, long step) {
  if (schedule.total_steps < 1) throw std::invalid_argument("phi_at: total_steps must be >= 1");
  if (step < 0 || step > schedule.total_steps) throw std::out_of_range("phi_at: step outside schedule");
  const double frac = static_cast<double>(step) / static_cast<double>(schedule.total_steps);
  const double phi = 0.5 * (1.0 - std::cos(3.141592653589793238463 * frac));
  return std::min(schedule.phi_cap, phi);
}

// Min-max normalization into [0, 1], clamped: positions the local optimizer
// moved outside the proposal domain still map to a valid unit position.
inline double to_unit(const ProposalDomain& domain, double x, int dim) {
  const Interval& iv = domain.bounds.at(dim);
  const double u = (x - iv.lo) / (iv.hi - iv.lo);
  return std::clamp(u, 0.0, 1.0);
}

struct BetaParams {
  double alpha = 0.0;
  double beta = 0.0;
  // Post-clamp targets the parameters were solved for; Beta(alpha, beta) has
  // exactly this mean and standard deviation.
  double mean = 0.0;
  double stddev = 0.0;
};

// Moment-matched Beta parameters for unit position `upsilon` at concentration
// `phi`. Interpolates mean and standard deviation between the uniform
// distribution (phi = 0) and a Dirac at upsilon (phi -> 1):
//   mu    = phi * upsilon + (1 - phi) * 0.5
//   sigma = (1 - phi) / sqrt(12)
// then solves alpha = c1 * beta, beta = (c1 - c2) / (c2 (c1 + 1)) with
// c1 = mu / (1 - mu), c2 = sigma^2 (c1 + 1)^2.
//
// mu is clamped to [1e-6, 1 - 1e-6] and sigma to 0.999 * sqrt(mu (1 - mu)),
// the validity region of the Beta family (sigma^2 < mu (1 - mu)).
inline BetaParams beta_params(double upsilon, double phi) {
  if (!(upsilon >= 0.0 && upsilon <= 1.0)) throw std::invalid_argument("beta_params: upsilon outside [0, 1]");
  if (!(phi >= 0.0)) throw std::invalid_argument("beta_params: phi must be >= 0");
  if (phi >= 1.0) throw std::invalid_argument("beta_params: phi must be < 1 (Dirac limit not representable)");

  constexpr double kMuEps = 1e-6;
  double mu = phi * upsilon + (1.0 - phi) * 0.5;
  mu = std::clamp(mu, kMuEps, 1.0 - kMuEps);
  double sigma = (1.0 - phi) / std::sqrt(12.0);
  sigma = std::min(sigma, 0.999 * std::sqrt(mu * (1.0 - mu)));

  const double c1 = mu / (1.0 - mu);
  const double c2 = sigma * sigma * (c1 + 1.0) * (c1 + 1.0);
  const double beta = (c1 - c2) / (c2 * (c1 + 1.0));
  const double alpha = c1 * beta;
  return BetaParams{alpha, beta, mu, sigma};
}

// One annealed proposal for dimension `dim`: normalize the current coordinate,
// moment-match a Beta around it, draw, and map back to the domain. The draw
// uses Rng::beta (ratio of Marsaglia-Tsang Gammas), so the output is an exact
// Beta sample and always lies inside the proposal interval.
inline double sample_proposal(double current, int dim, const ProposalDomain& domain,
                              double phi, Rng& rng) {
  const Interval& iv = domain.bounds.at(dim);
  const double upsilon = to_unit(domain, current, dim);
  const BetaParams bp = beta_params(upsilon, phi);
  const double u = rng.beta(bp.alpha, bp.beta);
  return iv.lo + u * (iv.hi - iv.lo);
}

}  // namespace dscd
