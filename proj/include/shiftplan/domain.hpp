#pragma once

// Scenario parameters, demand curves, the saturating reward and the algebra
// that maps a shift plan to active and extended supply.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shiftplan {

enum class DemandModel {
  EnvelopeSinusoid,  ///< (d_max/2)(1 - cos(pi t/12)) sin(pi t/T)
  OffsetSinusoid,    ///< d_max (1 + sin(pi t/12))
  Explicit,          ///< user supplied, one value per step
};

/// How window sums treat indices before the first step.
enum class Boundary {
  ZeroPadded,  ///< no shifts precede the horizon
  Circular,    ///< indices wrap modulo the horizon length
};

struct Scenario {
  int horizon = 168;          // T
  int drivers = 10;           // N
  int shifts_per_driver = 5;  // s
  int shift_length = 8;       // delta
  int min_break = 8;          // beta
  double peak_demand = 10.0;  // d_max
  double steepness = 2.0;     // a
  int vehicle_cap = 10;       // c_veh
  DemandModel demand_model = DemandModel::EnvelopeSinusoid;
  std::vector<double> demand;  // only read for DemandModel::Explicit
  Boundary boundary = Boundary::ZeroPadded;

  long total_shifts() const { return static_cast<long>(shifts_per_driver) * drivers; }

  /// Total personnel time s*N*delta, the budget of the shift-agnostic relaxation.
  double working_time() const {
    return static_cast<double>(shifts_per_driver) * drivers * shift_length;
  }

  /// Largest supply any feasible plan can reach at one step.
  int supply_cap() const { return vehicle_cap < drivers ? vehicle_cap : drivers; }

  void validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
    if (horizon < 1) fail("T must be >= 1");
    if (drivers < 0) fail("N must be >= 0");
    if (shifts_per_driver < 1) fail("s must be >= 1");
    if (shift_length < 1 || shift_length > horizon) fail("delta must lie in [1, T]");
    if (min_break < 0) fail("beta must be >= 0");
    if (!(peak_demand >= 0.0) || !std::isfinite(peak_demand)) fail("d_max must be finite and >= 0");
    if (!(steepness > 0.0) || !std::isfinite(steepness)) fail("a must be finite and > 0");
    if (vehicle_cap < 0) fail("c_veh must be >= 0");
    if (demand_model == DemandModel::Explicit) {
      if (demand.size() != static_cast<std::size_t>(horizon)) fail("explicit demand must have T entries");
      for (double d : demand)
        if (!(d >= 0.0) || !std::isfinite(d)) fail("explicit demand entries must be finite and >= 0");
    }
  }
};

/// Shift starts per step; starts[t-1] is the number of shifts beginning at step t.
struct ShiftPlan {
  std::vector<int> starts;

  long total() const {
    long sum = 0;
    for (int v : starts) sum += v;
    return sum;
  }
  bool operator==(const ShiftPlan&) const = default;
};

/// Active shifts (y) and active extended shifts (z) per step.
struct SupplyCurve {
  std::vector<int> active;
  std::vector<int> extended;
};

struct RewardParams {
  double demand = 0.0;     // d, rides demanded at the step
  double steepness = 1.0;  // a

  void validate() const {
    if (!(demand >= 0.0) || !std::isfinite(demand))
      throw std::invalid_argument("reward: demand must be finite and >= 0");
    if (!(steepness > 0.0) || !std::isfinite(steepness))
      throw std::invalid_argument("reward: steepness must be finite and > 0");
  }
};

/// Demand at step t, 1 <= t <= T.
inline double demand_at(const Scenario& sc, int t) {
  if (t < 1 || t > sc.horizon)
    throw std::out_of_range("demand_at: step " + std::to_string(t) + " outside [1, " +
                            std::to_string(sc.horizon) + "]");
  constexpr double pi = std::numbers::pi;
  double value = 0.0;
  switch (sc.demand_model) {
    case DemandModel::EnvelopeSinusoid:
      value = 0.5 * sc.peak_demand * (1.0 - std::cos(pi * t / 12.0)) *
              std::sin(pi * t / static_cast<double>(sc.horizon));
      break;
    case DemandModel::OffsetSinusoid:
      value = sc.peak_demand * (1.0 + std::sin(pi * t / 12.0));
      break;
    case DemandModel::Explicit:
      if (sc.demand.size() != static_cast<std::size_t>(sc.horizon))
        throw std::invalid_argument("demand_at: explicit demand must have T entries");
      value = sc.demand[static_cast<std::size_t>(t - 1)];
      break;
  }
  // Round-off at the zeros of the sinusoids can produce -1e-16.
  return value > 0.0 ? value : 0.0;
}

/// Demand for every step, index t-1 holds step t.
inline std::vector<double> demand_curve(const Scenario& sc) {
  std::vector<double> d(static_cast<std::size_t>(sc.horizon));
  for (int t = 1; t <= sc.horizon; ++t) d[static_cast<std::size_t>(t - 1)] = demand_at(sc, t);
  return d;
}

/// Rides served with supply y: d (1 - exp(-a y / d)), and 0 when d == 0.
inline double reward(double y, const RewardParams& p) {
  if (!(y >= 0.0)) throw std::invalid_argument("reward: supply must be >= 0");
  if (p.demand == 0.0) return 0.0;
  return -p.demand * std::expm1(-p.steepness * y / p.demand);
}

/// d/dy of reward(); a at y = 0 for every positive demand.
inline double reward_slope(double y, const RewardParams& p) {
  if (p.demand == 0.0) return 0.0;
  return p.steepness * std::exp(-p.steepness * y / p.demand);
}

/// Members of the window {t - length + 1, ..., t} (0-based t) after boundary
/// resolution, as (index, multiplicity) pairs. Multiplicity exceeds one only
/// for circular windows longer than the horizon.
inline std::vector<std::pair<int, int>> window_members(int t, int length, int horizon,
                                                       Boundary boundary) {
  std::vector<std::pair<int, int>> members;
  if (length <= 0 || horizon <= 0) return members;
  if (boundary == Boundary::ZeroPadded) {
    int first = t - length + 1;
    if (first < 0) first = 0;
    for (int tau = first; tau <= t; ++tau) members.emplace_back(tau, 1);
    return members;
  }
  std::vector<int> count(static_cast<std::size_t>(horizon), 0);
  for (int k = 0; k < length; ++k) {
    int tau = ((t - k) % horizon + horizon) % horizon;
    ++count[static_cast<std::size_t>(tau)];
  }
  for (int tau = 0; tau < horizon; ++tau)
    if (count[static_cast<std::size_t>(tau)] > 0) members.emplace_back(tau, count[static_cast<std::size_t>(tau)]);
  return members;
}

inline SupplyCurve supply_curve(const ShiftPlan& plan, const Scenario& sc) {
  if (plan.starts.size() != static_cast<std::size_t>(sc.horizon))
    throw std::invalid_argument("supply_curve: plan has " + std::to_string(plan.starts.size()) +
                                " entries, expected T = " + std::to_string(sc.horizon));
  for (int v : plan.starts)
    if (v < 0) throw std::invalid_argument("supply_curve: negative shift count");

  const auto T = static_cast<std::size_t>(sc.horizon);
  SupplyCurve out{std::vector<int>(T, 0), std::vector<int>(T, 0)};
  auto window = [&](int t, int length) {
    int sum = 0;
    for (auto [tau, mult] : window_members(t, length, sc.horizon, sc.boundary))
      sum += mult * plan.starts[static_cast<std::size_t>(tau)];
    return sum;
  };
  for (int t = 0; t < sc.horizon; ++t) {
    out.active[static_cast<std::size_t>(t)] = window(t, sc.shift_length);
    out.extended[static_cast<std::size_t>(t)] = window(t, sc.shift_length + sc.min_break);
  }
  return out;
}

/// Sum of the exact exponential reward over the horizon for a given supply.
inline double total_reward(std::span<const int> active, const Scenario& sc) {
  if (active.size() != static_cast<std::size_t>(sc.horizon))
    throw std::invalid_argument("total_reward: supply length mismatch");
  double sum = 0.0;
  for (int t = 1; t <= sc.horizon; ++t)
    sum += reward(active[static_cast<std::size_t>(t - 1)], {demand_at(sc, t), sc.steepness});
  return sum;
}

inline double total_reward(const ShiftPlan& plan, const Scenario& sc) {
  return total_reward(supply_curve(plan, sc).active, sc);
}

}  // namespace shiftplan
