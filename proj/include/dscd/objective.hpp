#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dscd/rng.hpp"

namespace dscd {

using Position = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// A box-constrained objective. Evaluation must be a pure function of the
// position; out-of-box positions are legal inputs (no clamping here), since a
// local optimizer may leave the proposal domain.
struct Objective {
  std::string name;
  int dim = 0;
  std::vector<Interval> domain;
  long eval_budget = 20000;  // default evaluations allowed per run
  std::function<double(const Position&)> fn;
  std::function<Position(const Position&)> grad;  // empty if no analytic gradient
};

inline void validate_objective(const Objective& obj) {
  if (obj.dim < 1) throw std::invalid_argument(obj.name + ": dim must be >= 1");
  if (static_cast<int>(obj.domain.size()) != obj.dim)
    throw std::invalid_argument(obj.name + ": domain size must equal dim");
  for (const auto& iv : obj.domain)
    if (!(iv.lo < iv.hi)) throw std::invalid_argument(obj.name + ": domain needs lo < hi");
  if (obj.eval_budget < 1) throw std::invalid_argument(obj.name + ": eval budget must be positive");
}

inline void check_position(const Objective& obj, const Position& x) {
  if (static_cast<int>(x.size()) != obj.dim)
    throw std::invalid_argument(obj.name + ": position has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(obj.dim));
  for (double c : x)
    if (!std::isfinite(c)) throw std::invalid_argument(obj.name + ": position has non-finite coordinate");
}

inline double evaluate(const Objective& obj, const Position& x) {
  check_position(obj, x);
  return obj.fn(x);
}

inline Position gradient(const Objective& obj, const Position& x) {
  check_position(obj, x);
  if (!obj.grad) throw std::logic_error(obj.name + ": no analytic gradient");
  return obj.grad(x);
}

// Central differences, (f(x + h e_i) - f(x - h e_i)) / (2h). Test oracle for
// analytic gradients.
inline Position finite_diff_gradient(const Objective& obj, const Position& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: h must be positive");
  check_position(obj, x);
  Position g(x.size());
  Position p = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double fp = evaluate(obj, p);
    p[i] = x[i] - h;
    const double fm = evaluate(obj, p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

inline Position sample_uniform_position(const Objective& obj, Rng& rng) {
  Position x(obj.dim);
  for (int i = 0; i < obj.dim; ++i) x[i] = rng.uniform(obj.domain[i].lo, obj.domain[i].hi);
  return x;
}

// f(x) = 1/2 sum_i (x_i^4 - 16 x_i^2 + 5 x_i) on [-5, 5]^d.
// Coordinate-separable with many local minima; global minimum at
// x_i = -2.9035340277711771 for every i.
inline Objective styblinski_tang(int dim) {
  Objective obj;
  obj.name = "styblinski-tang";
  obj.dim = dim;
  obj.domain.assign(dim, Interval{-5.0, 5.0});
  obj.fn = [](const Position& x) {
    double s = 0.0;
    for (double c : x) {
      const double c2 = c * c;
      s += c2 * c2 - 16.0 * c2 + 5.0 * c;
    }
    return 0.5 * s;
  };
  obj.grad = [](const Position& x) {
    Position g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double c = x[i];
      g[i] = 2.0 * c * c * c - 16.0 * c + 2.5;
    }
    return g;
  };
  validate_objective(obj);
  return obj;
}

// f(x) = 418.9829 d - sum_i x_i sin(sqrt(|x_i|)) on [-500, 500]^d.
// Global minimum near x_i = 420.9687. The gradient component at x_i = 0 is
// defined as 0 (the directional limits agree there).
inline Objective schwefel(int dim) {
  Objective obj;
  obj.name = "schwefel";
  obj.dim = dim;
  obj.domain.assign(dim, Interval{-500.0, 500.0});
  obj.fn = [](const Position& x) {
    double s = 0.0;
    for (double c : x) s += c * std::sin(std::sqrt(std::fabs(c)));
    return 418.9829 * static_cast<double>(x.size()) - s;
  };
  obj.grad = [](const Position& x) {
    Position g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double c = x[i];
      if (c == 0.0) {
        g[i] = 0.0;
        continue;
      }
      const double r = std::sqrt(std::fabs(c));
      g[i] = -std::sin(r) - 0.5 * r * std::cos(r);
    }
    return g;
  };
  validate_objective(obj);
  return obj;
}

inline Objective objective_by_name(const std::string& name, int dim) {
  if (name == "styblinski-tang") return styblinski_tang(dim);
  if (name == "schwefel") return schwefel(dim);
  throw std::invalid_argument("unknown objective: " + name);
}

}  // namespace dscd
