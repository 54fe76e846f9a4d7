#pragma once

// Shift-agnostic optimum: the best reward reachable with the same personnel
// time s*N*delta but no shift structure at all,
//
//   max sum_t f_t(y_t)  s.t.  sum_t y_t = s N delta,  y >= 0.
//
// For the exponential reward every positive-demand step has slope a at zero
// supply, so the optimum spreads the budget proportionally to demand. The
// generic water-filling solver below makes no use of that and serves as the
// independent check of the closed form.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shiftplan/domain.hpp"

namespace shiftplan {

struct AgnosticOptimum {
  std::vector<double> supply;  // y*
  double reward = 0.0;         // r*
  double multiplier = 0.0;     // lambda, the common marginal reward
};

class UndefinedGapError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline double demand_sum(const std::vector<double>& d) { return std::accumulate(d.begin(), d.end(), 0.0); }

inline double reward_of(const std::vector<double>& supply, const std::vector<double>& demand, double a) {
  double r = 0.0;
  for (std::size_t t = 0; t < supply.size(); ++t) r += reward(supply[t], {demand[t], a});
  return r;
}

}  // namespace detail

inline AgnosticOptimum agnostic_optimum_closed_form(const Scenario& sc) {
  const auto d = demand_curve(sc);
  const double total = detail::demand_sum(d);
  if (!(total > 0.0)) throw UndefinedGapError("agnostic optimum: total demand is zero");
  const double budget = sc.working_time();
  AgnosticOptimum opt;
  opt.supply.resize(d.size());
  for (std::size_t t = 0; t < d.size(); ++t) opt.supply[t] = budget * d[t] / total;
  opt.reward = detail::reward_of(opt.supply, d, sc.steepness);
  opt.multiplier = sc.steepness * std::exp(-sc.steepness * budget / total);
  return opt;
}

struct WaterFillOptions {
  /// Initial bracket for the multiplier; non-positive values mean "choose".
  double lambda_low = 0.0;
  double lambda_high = 0.0;
  double rel_tol = 1e-10;
  int max_iterations = 400;
};

/// Bisection on the common marginal value lambda for a separable concave
/// allocation. `supply_at(t, lambda)` must return the non-negative supply at
/// which step t's marginal reward equals lambda (zero if even the first unit
/// is worth less), and be nonincreasing in lambda. `lambda_cap` is a lambda at
/// which every step's supply is zero.
inline std::pair<std::vector<double>, double> water_fill_generic(
    int steps, double budget, const std::function<double(int, double)>& supply_at, double lambda_cap,
    const WaterFillOptions& opts = {}) {
  if (!(budget >= 0.0)) throw std::invalid_argument("water_fill: budget must be >= 0");
  std::vector<double> y(static_cast<std::size_t>(steps), 0.0);
  if (budget == 0.0) return {y, lambda_cap};

  auto fill = [&](double lambda) {
    double sum = 0.0;
    for (int t = 0; t < steps; ++t) sum += (y[static_cast<std::size_t>(t)] = supply_at(t, lambda));
    return sum;
  };

  double hi = opts.lambda_high > 0.0 ? std::min(opts.lambda_high, lambda_cap) : lambda_cap;
  double lo = opts.lambda_low > 0.0 ? std::min(opts.lambda_low, hi) : hi * 0.5;
  // Widen until [lo, hi] brackets the budget: sum(lo) >= budget >= sum(hi).
  while (fill(hi) > budget) hi = std::min(lambda_cap, hi * 2.0);
  for (int guard = 0; fill(lo) < budget; ++guard) {
    if (guard > 2000) throw std::runtime_error("water_fill: could not bracket the budget");
    lo *= 0.5;
  }
  double lambda = lo;
  for (int it = 0; it < opts.max_iterations; ++it) {
    lambda = std::sqrt(lo * hi);
    const double sum = fill(lambda);
    if (std::abs(sum - budget) <= opts.rel_tol * budget) break;
    if (sum > budget) lo = lambda;
    else hi = lambda;
    if (hi - lo <= 1e-300) break;
  }
  fill(lambda);
  return {y, lambda};
}

/// Shift-agnostic optimum by water-filling, for any budget (default s*N*delta).
inline AgnosticOptimum water_fill(const Scenario& sc, std::optional<double> budget = std::nullopt,
                                  const WaterFillOptions& opts = {}) {
  const auto d = demand_curve(sc);
  const double a = sc.steepness;
  const double b = budget.value_or(sc.working_time());
  AgnosticOptimum opt;
  if (b == 0.0) {
    opt.supply.assign(d.size(), 0.0);
    opt.multiplier = a;
    return opt;
  }
  if (!(detail::demand_sum(d) > 0.0)) throw UndefinedGapError("water_fill: total demand is zero");
  // Inverse of the marginal reward a exp(-a y / d).
  auto supply_at = [&](int t, double lambda) {
    const double dt = d[static_cast<std::size_t>(t)];
    if (dt == 0.0 || lambda >= a) return 0.0;
    return dt / a * std::log(a / lambda);
  };
  auto [y, lambda] = water_fill_generic(sc.horizon, b, supply_at, a, opts);
  opt.supply = std::move(y);
  opt.multiplier = lambda;
  opt.reward = detail::reward_of(opt.supply, d, a);
  return opt;
}

struct KktResiduals {
  double stationarity = 0.0;     // max |f'(y) + mu - lambda|
  double dual_feasibility = 0.0;  // max(0, -mu)
  double complementarity = 0.0;  // max |mu y|
  double budget = 0.0;           // |sum y - budget| / budget
  double primal_feasibility = 0.0;  // max(0, -y)

  double worst() const {
    return std::max({stationarity, dual_feasibility, complementarity, budget, primal_feasibility});
  }
};

/// Residuals of the optimality system for the allocation problem, with
/// mu_t = lambda - f'(y_t) on steps where y_t == 0 and mu_t = 0 elsewhere.
inline KktResiduals kkt_residuals(const Scenario& sc, const AgnosticOptimum& opt,
                                  std::optional<double> budget = std::nullopt) {
  const auto d = demand_curve(sc);
  const double b = budget.value_or(sc.working_time());
  KktResiduals res;
  double sum = 0.0;
  for (std::size_t t = 0; t < d.size(); ++t) {
    const double y = opt.supply[t];
    sum += y;
    res.primal_feasibility = std::max(res.primal_feasibility, -y);
    const double slope = reward_slope(std::max(y, 0.0), {d[t], sc.steepness});
    const double mu = y > 0.0 ? 0.0 : opt.multiplier - slope;
    res.stationarity = std::max(res.stationarity, std::abs(slope + mu - opt.multiplier));
    res.dual_feasibility = std::max(res.dual_feasibility, -mu);
    res.complementarity = std::max(res.complementarity, std::abs(mu * y));
  }
  res.budget = b > 0.0 ? std::abs(sum - b) / b : std::abs(sum);
  return res;
}

struct GapReport {
  double delta = 0.0;
  double r_star = 0.0;
  double plan_reward = 0.0;
};

/// Relative gap (r* - reward(plan)) / r* to the shift-agnostic optimum.
inline GapReport relative_gap(const ShiftPlan& plan, const Scenario& sc) {
  GapReport g;
  g.plan_reward = total_reward(plan, sc);
  const auto d = demand_curve(sc);
  if (sc.working_time() > 0.0 && detail::demand_sum(d) > 0.0)
    g.r_star = agnostic_optimum_closed_form(sc).reward;
  if (!(g.r_star > 0.0)) throw UndefinedGapError("relative gap undefined: shift-agnostic optimum is zero");
  g.delta = (g.r_star - g.plan_reward) / g.r_star;
  return g;
}

/// Supply serving the fraction c of demand at each step: f_t(y) = c d_t.
inline std::vector<double> service_standard_supply(const Scenario& sc, double c_frac) {
  if (!(c_frac > 0.0 && c_frac < 1.0)) throw std::invalid_argument("service standard: c must lie in (0, 1)");
  const double a = sc.steepness;
  const auto d = demand_curve(sc);
  std::vector<double> y(d.size());
  for (std::size_t t = 0; t < d.size(); ++t) {
    y[t] = -d[t] / a * std::log1p(-c_frac);
    const double served = reward(y[t], {d[t], a});
    const double target = c_frac * d[t];
    if (std::abs(served - target) > 1e-9 * std::max(target, 1e-300) && std::abs(served - target) > 1e-300)
      throw std::logic_error("service standard: f(y) = c d violated at step " + std::to_string(t + 1));
  }
  return y;
}

/// Supply maximizing f_t(y) - c y at each step.
inline std::vector<double> economic_standard_supply(const Scenario& sc, double c_cost) {
  if (!(c_cost > 0.0)) throw std::invalid_argument("economic standard: cost must be > 0");
  const double a = sc.steepness;
  const auto d = demand_curve(sc);
  std::vector<double> y(d.size(), 0.0);
  if (a <= c_cost) return y;
  for (std::size_t t = 0; t < d.size(); ++t) {
    y[t] = d[t] / a * std::log(a / c_cost);
    if (d[t] > 0.0 && std::abs(reward_slope(y[t], {d[t], a}) - c_cost) > 1e-9 * c_cost)
      throw std::logic_error("economic standard: marginal reward differs from cost at step " + std::to_string(t + 1));
  }
  return y;
}

}  // namespace shiftplan
