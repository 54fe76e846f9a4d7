#pragma once

// MILP formulations of shift planning and the wrapper that solves them and
// reads the plan back.
//
// Column layout (T columns each): x (shift starts, integer), y (active
// supply), z (active extended supply), then r (reward epigraph) or e
// (deviation epigraph). Rows: the T supply definitions, the T extended-supply
// definitions, the total-shift row, then one row per chord piece and step.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "shiftplan/benchmark.hpp"
#include "shiftplan/domain.hpp"
#include "shiftplan/milp/branch_and_bound.hpp"
#include "shiftplan/milp/model.hpp"
#include "shiftplan/piecewise.hpp"

namespace shiftplan {

struct PlanResult {
  ShiftPlan plan;
  SupplyCurve supply;
  double mip_objective = 0.0;
  double true_reward = 0.0;
  milp::SolveStatus solve_status = milp::SolveStatus::Infeasible;
  long nodes = 0;
  double best_bound = 0.0;

  bool optimal() const { return solve_status == milp::SolveStatus::Optimal; }
};

class PlanningError : public std::runtime_error {
 public:
  PlanningError(milp::SolveStatus status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  milp::SolveStatus status() const { return status_; }

 private:
  milp::SolveStatus status_;
};

struct ColumnLayout {
  int horizon = 0;
  int x(int t) const { return t; }
  int y(int t) const { return horizon + t; }
  int z(int t) const { return 2 * horizon + t; }
  int objective_var(int t) const { return 3 * horizon + t; }
};

namespace detail {

inline std::string step_name(const char* prefix, int t) { return prefix + std::to_string(t + 1); }

/// Columns x, y, z and the definition rows shared by both programs.
inline ColumnLayout add_shift_structure(milp::MilpModel& m, const Scenario& sc) {
  const int T = sc.horizon;
  const double n = sc.drivers;
  for (int t = 0; t < T; ++t) m.add_variable(step_name("x_", t), 0.0, n, 0.0, true);
  for (int t = 0; t < T; ++t) m.add_variable(step_name("y_", t), 0.0, sc.vehicle_cap, 0.0, false);
  for (int t = 0; t < T; ++t) m.add_variable(step_name("z_", t), 0.0, n, 0.0, false);
  const ColumnLayout cols{T};

  auto window_row = [&](int t, int length, int defined, const char* name) {
    std::vector<milp::Term> terms{{defined, 1.0}};
    for (auto [tau, mult] : window_members(t, length, T, sc.boundary)) terms.push_back({cols.x(tau), -double(mult)});
    m.add_row(std::move(terms), milp::Sense::Equal, 0.0, step_name(name, t));
  };
  for (int t = 0; t < T; ++t) window_row(t, sc.shift_length, cols.y(t), "supply_");
  for (int t = 0; t < T; ++t) window_row(t, sc.shift_length + sc.min_break, cols.z(t), "extended_");

  std::vector<milp::Term> all;
  all.reserve(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) all.push_back({cols.x(t), 1.0});
  m.add_row(std::move(all), milp::Sense::Equal, static_cast<double>(sc.total_shifts()), "total_shifts");
  return cols;
}

/// Chords need at least one segment even when no supply is possible.
inline int chord_cap(const Scenario& sc) { return std::max(1, sc.supply_cap()); }

}  // namespace detail

inline milp::MilpModel build_reward_mip(const Scenario& sc) {
  sc.validate();
  milp::MilpModel m;
  const ColumnLayout cols = detail::add_shift_structure(m, sc);
  for (int t = 0; t < sc.horizon; ++t) m.add_variable(detail::step_name("r_", t), 0.0, milp::kInf, 1.0, false);

  const int cap = detail::chord_cap(sc);
  for (int t = 0; t < sc.horizon; ++t) {
    const auto pl = concavify_reward({demand_at(sc, t + 1), sc.steepness}, cap);
    int i = 0;
    for (const auto& piece : pl.pieces()) {
      m.add_row({{cols.objective_var(t), 1.0}, {cols.y(t), -piece.slope}}, milp::Sense::LessEqual, piece.intercept,
                "reward_" + std::to_string(t + 1) + "_" + std::to_string(++i));
    }
  }
  return m;
}

inline milp::MilpModel build_deviation_mip(const Scenario& sc, const std::vector<double>& desired) {
  sc.validate();
  if (desired.size() != static_cast<std::size_t>(sc.horizon))
    throw std::invalid_argument("build_deviation_mip: desired supply has " + std::to_string(desired.size()) +
                                " entries, expected T = " + std::to_string(sc.horizon));
  for (double v : desired)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("build_deviation_mip: desired supply must be finite and >= 0");

  milp::MilpModel m;
  const ColumnLayout cols = detail::add_shift_structure(m, sc);
  for (int t = 0; t < sc.horizon; ++t) m.add_variable(detail::step_name("dev_", t), 0.0, milp::kInf, -1.0, false);

  const int cap = detail::chord_cap(sc);
  for (int t = 0; t < sc.horizon; ++t) {
    const auto pl = convexify_sq_dev(desired[static_cast<std::size_t>(t)], cap);
    int i = 0;
    for (const auto& piece : pl.pieces()) {
      m.add_row({{cols.objective_var(t), 1.0}, {cols.y(t), -piece.slope}}, milp::Sense::GreaterEqual, piece.intercept,
                "deviation_" + std::to_string(t + 1) + "_" + std::to_string(++i));
    }
  }
  return m;
}

/// Solves a model built by build_reward_mip or build_deviation_mip and reads
/// back the plan. Throws PlanningError when no plan was found.
inline PlanResult solve_plan_model(const milp::MilpModel& model, const Scenario& sc, const milp::MilpOptions& opts = {}) {
  const milp::MilpSolution sol = milp::milp_solve(model, opts);
  if (!sol.has_solution()) {
    throw PlanningError(sol.status, std::string("planning failed: solver status ") + std::string(milp::to_string(sol.status)));
  }
  PlanResult res;
  res.solve_status = sol.status;
  res.nodes = sol.nodes_explored;
  res.mip_objective = sol.objective;
  res.best_bound = sol.best_bound;
  const ColumnLayout cols{sc.horizon};
  res.plan.starts.resize(static_cast<std::size_t>(sc.horizon));
  for (int t = 0; t < sc.horizon; ++t) {
    const double v = sol.values[static_cast<std::size_t>(cols.x(t))];
    const double r = std::round(v);
    if (std::abs(v - r) > milp::kIntegralityTol)
      throw PlanningError(sol.status, "planning failed: fractional shift count at step " + std::to_string(t + 1));
    res.plan.starts[static_cast<std::size_t>(t)] = static_cast<int>(r);
  }
  res.supply = supply_curve(res.plan, sc);
  res.true_reward = total_reward(res.supply.active, sc);
  return res;
}

inline PlanResult plan(const Scenario& sc, const milp::MilpOptions& opts = {}) {
  return solve_plan_model(build_reward_mip(sc), sc, opts);
}

/// Traditional desired-supply rule followed by deviation-minimizing planning.
struct Standard {
  enum class Kind { Service, Economic };
  Kind kind = Kind::Service;
  double parameter = 0.8;  // served fraction for Service, cost per supply unit for Economic

  static Standard service(double c_frac) { return {Kind::Service, c_frac}; }
  static Standard economic(double c_cost) { return {Kind::Economic, c_cost}; }
};

inline std::vector<double> desired_supply(const Scenario& sc, const Standard& standard) {
  return standard.kind == Standard::Kind::Service ? service_standard_supply(sc, standard.parameter)
                                                  : economic_standard_supply(sc, standard.parameter);
}

/// mip_objective holds the (negated) squared deviation; true_reward is the
/// exact reward of the resulting plan.
inline PlanResult plan_baseline(const Scenario& sc, const Standard& standard, const milp::MilpOptions& opts = {}) {
  return solve_plan_model(build_deviation_mip(sc, desired_supply(sc, standard)), sc, opts);
}

}  // namespace shiftplan
