#pragma once

// Experiment configs and the commands behind the command-line tool. Every
// command builds its outputs in memory and commits them with
// io::write_files_atomic, so a failed run leaves no partial files.
//
// Config file layout:
//
//   {
//     "experiment": "plan" | "sweep_drivers" | "sweep_shifts_per_driver" |
//                   "sweep_shift_length" | "compare_baselines" | "roster",
//     "scenario": { ...see io/scenario_json.hpp... },
//     "values": [5, 10, 25, 50],         // sweeps and compare_baselines
//     "demand_per_driver": 1.0,          // d_max = ratio * N when N varies
//     "service_c": 0.8, "economic_c": 1.0,
//     "service_c_values": [0.5, 0.8, 0.95], "economic_c_values": [0.5, 1, 1.5],
//     "plan": [0, 1, ...],               // roster: use this plan instead of solving
//     "rel_gap": 1e-6,
//     "output": "out/reference"
//   }

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "shiftplan/benchmark.hpp"
#include "shiftplan/domain.hpp"
#include "shiftplan/io/csv.hpp"
#include "shiftplan/io/scenario_json.hpp"
#include "shiftplan/milp/lp_format.hpp"
#include "shiftplan/planner.hpp"
#include "shiftplan/roster.hpp"

namespace shiftplan::cli {

enum class ExperimentKind { Plan, SweepDrivers, SweepShiftsPerDriver, SweepShiftLength, CompareBaselines, Roster };

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitIo = 4,
  kExitRoster = 5,
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Plan;
  Scenario base;
  bool vehicle_cap_follows_drivers = true;  // "c_veh" absent from the scenario
  std::vector<double> values;
  std::optional<double> demand_per_driver;
  double service_c = 0.8;
  double economic_c = 1.0;
  std::vector<double> service_c_values;
  std::vector<double> economic_c_values;
  std::optional<ShiftPlan> plan;
  std::optional<double> rel_gap;
  std::string output;
};

inline std::optional<ExperimentKind> parse_kind(const std::string& name) {
  if (name == "plan") return ExperimentKind::Plan;
  if (name == "sweep_drivers") return ExperimentKind::SweepDrivers;
  if (name == "sweep_shifts_per_driver") return ExperimentKind::SweepShiftsPerDriver;
  if (name == "sweep_shift_length") return ExperimentKind::SweepShiftLength;
  if (name == "compare_baselines") return ExperimentKind::CompareBaselines;
  if (name == "roster") return ExperimentKind::Roster;
  return std::nullopt;
}

inline bool is_sweep(ExperimentKind k) {
  return k == ExperimentKind::SweepDrivers || k == ExperimentKind::SweepShiftsPerDriver ||
         k == ExperimentKind::SweepShiftLength;
}

inline ExperimentSpec parse_experiment(const nlohmann::json& j) {
  using io::ConfigError;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const char* const keys[] = {"experiment", "scenario",        "values",           "demand_per_driver",
                                     "service_c",  "economic_c",      "service_c_values", "economic_c_values",
                                     "plan",       "rel_gap",         "output"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(keys), std::end(keys), [&](const char* k) { return key == k; }) == std::end(keys))
      throw ConfigError("config: unknown key \"" + key + "\"");
  }
  auto get = [&](const char* key, auto fallback) {
    using T = decltype(fallback);
    if (!j.contains(key)) return fallback;
    try {
      return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("config: key \"") + key + "\" has the wrong type");
    }
  };

  ExperimentSpec spec;
  const auto kind_name = get("experiment", std::string("plan"));
  const auto kind = parse_kind(kind_name);
  if (!kind) throw ConfigError("config: unknown experiment \"" + kind_name + "\"");
  spec.kind = *kind;
  if (!j.contains("scenario")) throw ConfigError("config: missing key \"scenario\"");
  spec.base = io::scenario_from_json(j.at("scenario"));
  spec.vehicle_cap_follows_drivers = !j.at("scenario").contains("c_veh");
  spec.values = get("values", std::vector<double>{});
  if (j.contains("demand_per_driver")) spec.demand_per_driver = get("demand_per_driver", 0.0);
  spec.service_c = get("service_c", spec.service_c);
  spec.economic_c = get("economic_c", spec.economic_c);
  spec.service_c_values = get("service_c_values", std::vector<double>{});
  spec.economic_c_values = get("economic_c_values", std::vector<double>{});
  if (j.contains("rel_gap")) spec.rel_gap = get("rel_gap", 0.0);
  spec.output = get("output", std::string{});
  if (j.contains("plan")) spec.plan = ShiftPlan{get("plan", std::vector<int>{})};

  if (is_sweep(spec.kind) || spec.kind == ExperimentKind::CompareBaselines) {
    if (spec.values.empty()) throw ConfigError("config: \"values\" must list the swept parameter values");
    for (double v : spec.values)
      if (!(v >= 0.0) || v != std::floor(v) || (v == 0.0 && spec.kind != ExperimentKind::SweepDrivers &&
                                                spec.kind != ExperimentKind::CompareBaselines))
        throw ConfigError("config: sweep values must be integers, positive for s and delta");
  }
  if (spec.demand_per_driver && !(*spec.demand_per_driver >= 0.0))
    throw ConfigError("config: demand_per_driver must be >= 0");
  for (double c : spec.service_c_values)
    if (!(c > 0.0 && c < 1.0)) throw ConfigError("config: service_c_values must lie in (0, 1)");
  for (double c : spec.economic_c_values)
    if (!(c > 0.0)) throw ConfigError("config: economic_c_values must be > 0");
  if (spec.kind == ExperimentKind::CompareBaselines) {
    if (!(spec.service_c > 0.0 && spec.service_c < 1.0)) throw ConfigError("config: service_c must lie in (0, 1)");
    if (!(spec.economic_c > 0.0)) throw ConfigError("config: economic_c must be > 0");
  }
  if (spec.rel_gap && !(*spec.rel_gap >= 0.0)) throw ConfigError("config: rel_gap must be >= 0");
  if (spec.plan) {
    if (spec.plan->starts.size() != static_cast<std::size_t>(spec.base.horizon))
      throw ConfigError("config: \"plan\" must have T entries");
    for (int v : spec.plan->starts)
      if (v < 0) throw ConfigError("config: \"plan\" entries must be >= 0");
  }
  return spec;
}

inline ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const io::IoError& e) {
    throw io::ConfigError(std::string("config: ") + e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw io::ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_experiment(j);
}

// ---------------------------------------------------------------------------
// Computations

/// Relative gap, reported as 1 when the shift-agnostic optimum is zero
/// (no drivers or no demand): nothing of a zero optimum is achieved.
inline double reported_gap(const ShiftPlan& plan, const Scenario& sc) {
  try {
    return relative_gap(plan, sc).delta;
  } catch (const UndefinedGapError&) {
    return 1.0;
  }
}

inline double reported_r_star(const Scenario& sc) {
  try {
    return agnostic_optimum_closed_form(sc).reward;
  } catch (const UndefinedGapError&) {
    return 0.0;
  }
}

inline std::vector<double> agnostic_supply(const Scenario& sc) {
  try {
    return agnostic_optimum_closed_form(sc).supply;
  } catch (const UndefinedGapError&) {
    return std::vector<double>(static_cast<std::size_t>(sc.horizon), 0.0);
  }
}

struct PlanReport {
  Scenario scenario;
  PlanResult result;
  double r_star = 0.0;
  double gap = 1.0;
};

inline milp::MilpOptions solver_options(std::optional<double> rel_gap) {
  milp::MilpOptions o;
  if (rel_gap) o.rel_gap = *rel_gap;
  return o;
}

inline PlanReport run_plan(const Scenario& sc, const milp::MilpOptions& opts) {
  PlanReport r{sc, plan(sc, opts), reported_r_star(sc), 1.0};
  r.gap = reported_gap(r.result.plan, sc);
  return r;
}

/// Scenario for one sweep point, following the scaling rules of the
/// experiment kind.
inline Scenario sweep_scenario(const ExperimentSpec& spec, double value) {
  Scenario sc = spec.base;
  const int v = static_cast<int>(value);
  const long shift_time = spec.base.total_shifts() * spec.base.shift_length;  // s N delta
  switch (spec.kind) {
    case ExperimentKind::SweepDrivers:
    case ExperimentKind::CompareBaselines:
      sc.drivers = v;
      break;
    case ExperimentKind::SweepShiftsPerDriver:
      // s N delta and delta fixed: N = s0 N0 / s.
      if (spec.base.total_shifts() % v != 0)
        throw io::ConfigError("config: s = " + std::to_string(v) + " does not divide s*N = " +
                              std::to_string(spec.base.total_shifts()));
      sc.shifts_per_driver = v;
      sc.drivers = static_cast<int>(spec.base.total_shifts() / v);
      break;
    case ExperimentKind::SweepShiftLength:
      // s N delta and s fixed: N = N0 delta0 / delta.
      if ((shift_time / spec.base.shifts_per_driver) % v != 0)
        throw io::ConfigError("config: delta = " + std::to_string(v) + " does not divide N*delta = " +
                              std::to_string(shift_time / spec.base.shifts_per_driver));
      sc.shift_length = v;
      sc.drivers = static_cast<int>(shift_time / spec.base.shifts_per_driver / v);
      break;
    default:
      break;
  }
  if (spec.demand_per_driver) sc.peak_demand = *spec.demand_per_driver * sc.drivers;
  if (spec.vehicle_cap_follows_drivers) sc.vehicle_cap = sc.drivers;
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw io::ConfigError(std::string("config: sweep value ") + io::format_number(value) + ": " + e.what());
  }
  return sc;
}

struct SweepPoint {
  double value = 0.0;
  PlanReport report;
};

inline std::vector<double> sorted_values(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

inline std::vector<SweepPoint> run_sweep(const ExperimentSpec& spec, const milp::MilpOptions& opts) {
  std::vector<SweepPoint> points;
  for (double v : sorted_values(spec.values)) points.push_back({v, run_plan(sweep_scenario(spec, v), opts)});
  return points;
}

struct ComparePoint {
  double drivers = 0.0;
  double gap_ours = 1.0;
  double gap_service = 1.0;
  double gap_economic = 1.0;
};

struct RobustnessPoint {
  double drivers = 0.0;
  std::string standard;
  double parameter = 0.0;
  double gap = 1.0;
};

struct CompareReport {
  std::vector<ComparePoint> points;
  std::vector<RobustnessPoint> robustness;
};

inline double baseline_gap(const Scenario& sc, const Standard& standard, const milp::MilpOptions& opts) {
  return reported_gap(plan_baseline(sc, standard, opts).plan, sc);
}

inline CompareReport run_compare(const ExperimentSpec& spec, const milp::MilpOptions& opts) {
  CompareReport rep;
  for (double v : sorted_values(spec.values)) {
    const Scenario sc = sweep_scenario(spec, v);
    ComparePoint p{v};
    p.gap_ours = reported_gap(plan(sc, opts).plan, sc);
    p.gap_service = baseline_gap(sc, Standard::service(spec.service_c), opts);
    p.gap_economic = baseline_gap(sc, Standard::economic(spec.economic_c), opts);
    rep.points.push_back(p);
    for (double c : spec.service_c_values)
      rep.robustness.push_back({v, "service", c, baseline_gap(sc, Standard::service(c), opts)});
    for (double c : spec.economic_c_values)
      rep.robustness.push_back({v, "economic", c, baseline_gap(sc, Standard::economic(c), opts)});
    rep.robustness.push_back({v, "ours", 0.0, p.gap_ours});
  }
  return rep;
}

struct RosterReportBundle {
  ShiftPlan plan;
  Roster roster;
  RosterReport check;
  std::vector<SwapRecord> swaps;
};

/// Builds and verifies the roster. Any failure of the construction is
/// reported as a verification violation rather than thrown.
inline RosterReportBundle run_roster(const Scenario& sc, const ShiftPlan& plan) {
  RosterReportBundle out;
  out.plan = plan;
  try {
    out.roster = build_roster(plan, sc, [&](const SwapRecord& r) { out.swaps.push_back(r); });
    out.check = verify_roster(out.roster, plan, sc);
  } catch (const RosterError& e) {
    out.check = {false, {{ViolationKind::Overlap, -1, e.what()}}};
  } catch (const std::invalid_argument& e) {
    out.check = {false, {{ViolationKind::ShiftCount, -1, e.what()}}};
  }
  return out;
}

/// Reruns the rebalancing from a randomly relabelled greedy roster and
/// checks the result; a cheap randomized self-check of the construction.
inline RosterReport roster_self_check(const Scenario& sc, const ShiftPlan& plan, std::uint64_t seed) {
  try {
    Roster greedy = greedy_assign(plan, sc);
    std::mt19937_64 rng(seed);
    std::shuffle(greedy.drivers.begin(), greedy.drivers.end(), rng);
    return verify_roster(rebalance(std::move(greedy), sc.shifts_per_driver), plan, sc);
  } catch (const std::exception& e) {
    return {false, {{ViolationKind::Overlap, -1, e.what()}}};
  }
}

// ---------------------------------------------------------------------------
// Output tables

using OutputFiles = std::vector<std::pair<std::filesystem::path, std::string>>;
using io::format_number;

inline std::string plan_csv(const ShiftPlan& plan) {
  io::CsvTable t{{"t", "x"}, {}};
  for (std::size_t i = 0; i < plan.starts.size(); ++i)
    t.add_row({format_number(static_cast<long>(i + 1)), format_number(plan.starts[i])});
  return io::to_csv_text(t);
}

inline std::string supply_csv(const PlanReport& r) {
  const Scenario& sc = r.scenario;
  const auto d = demand_curve(sc);
  const auto y_star = agnostic_supply(sc);
  io::CsvTable t{{"t", "demand", "y", "z", "y_star", "reward"}, {}};
  for (int i = 0; i < sc.horizon; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const int y = r.result.supply.active[k];
    t.add_row({format_number(i + 1), format_number(d[k]), format_number(y), format_number(r.result.supply.extended[k]),
               format_number(y_star[k]), format_number(reward(y, {d[k], sc.steepness}))});
  }
  return io::to_csv_text(t);
}

inline nlohmann::json plan_summary(const PlanReport& r) {
  const auto& ext = r.result.supply.extended;
  const auto& act = r.result.supply.active;
  return {{"sum_x", r.result.plan.total()},
          {"expected_sum_x", r.scenario.total_shifts()},
          {"max_y", act.empty() ? 0 : *std::max_element(act.begin(), act.end())},
          {"max_z", ext.empty() ? 0 : *std::max_element(ext.begin(), ext.end())},
          {"true_reward", r.result.true_reward},
          {"mip_objective", r.result.mip_objective},
          {"best_bound", r.result.best_bound},
          {"r_star", r.r_star},
          {"relative_gap", r.gap},
          {"solver_status", std::string(milp::to_string(r.result.solve_status))},
          {"nodes", r.result.nodes},
          {"scenario", io::scenario_to_json(r.scenario)}};
}

inline OutputFiles plan_outputs(const PlanReport& r, const std::filesystem::path& dir) {
  return {{dir / "plan.csv", plan_csv(r.result.plan)},
          {dir / "supply.csv", supply_csv(r)},
          {dir / "summary.json", plan_summary(r).dump(2) + "\n"}};
}

inline OutputFiles sweep_outputs(const std::vector<SweepPoint>& points, const std::filesystem::path& dir) {
  io::CsvTable table{{"sweep_value", "relative_gap", "true_reward", "r_star", "nodes", "N", "s", "delta", "d_max",
                      "solver_status"},
                     {}};
  io::CsvTable curves{{"sweep_value", "t", "y_normalized", "y_star_normalized"}, {}};
  for (const auto& p : points) {
    const Scenario& sc = p.report.scenario;
    table.add_row({format_number(p.value), format_number(p.report.gap), format_number(p.report.result.true_reward),
                   format_number(p.report.r_star), format_number(p.report.result.nodes), format_number(sc.drivers),
                   format_number(sc.shifts_per_driver), format_number(sc.shift_length), format_number(sc.peak_demand),
                   std::string(milp::to_string(p.report.result.solve_status))});
    const double w = sc.working_time();
    const auto y_star = agnostic_supply(sc);
    for (int i = 0; i < sc.horizon; ++i) {
      const auto k = static_cast<std::size_t>(i);
      curves.add_row({format_number(p.value), format_number(i + 1),
                      format_number(w > 0.0 ? p.report.result.supply.active[k] / w : 0.0),
                      format_number(w > 0.0 ? y_star[k] / w : 0.0)});
    }
  }
  return {{dir / "sweep.csv", io::to_csv_text(table)}, {dir / "sweep_supply.csv", io::to_csv_text(curves)}};
}

inline OutputFiles compare_outputs(const CompareReport& rep, const std::filesystem::path& dir) {
  io::CsvTable table{{"N", "gap_ours", "gap_service", "gap_economic"}, {}};
  for (const auto& p : rep.points)
    table.add_row({format_number(p.drivers), format_number(p.gap_ours), format_number(p.gap_service),
                   format_number(p.gap_economic)});
  io::CsvTable robust{{"N", "standard", "c", "relative_gap"}, {}};
  for (const auto& p : rep.robustness)
    robust.add_row({format_number(p.drivers), p.standard, format_number(p.parameter), format_number(p.gap)});
  return {{dir / "compare.csv", io::to_csv_text(table)}, {dir / "compare_robustness.csv", io::to_csv_text(robust)}};
}

inline io::CsvTable roster_table(const Roster& roster, const Scenario& sc) {
  io::CsvTable t{{"driver_id", "shift_index", "start_step", "end_step"}, {}};
  for (std::size_t d = 0; d < roster.drivers.size(); ++d)
    for (std::size_t i = 0; i < roster.drivers[d].size(); ++i) {
      const int start = roster.drivers[d][i].start;
      t.add_row({format_number(static_cast<long>(d)), format_number(static_cast<long>(i)), format_number(start),
                 format_number(start + sc.shift_length)});
    }
  return t;
}

/// Inverse of roster_table: rebuilds the extended shifts from the CSV rows.
inline Roster roster_from_table(const io::CsvTable& t, const Scenario& sc) {
  Roster roster;
  const auto driver = t.column("driver_id"), index = t.column("shift_index"), start = t.column("start_step"),
             end = t.column("end_step");
  for (const auto& row : t.rows) {
    const auto d = static_cast<std::size_t>(io::parse_number(row[driver]));
    const auto i = static_cast<std::size_t>(io::parse_number(row[index]));
    const int s0 = static_cast<int>(io::parse_number(row[start]));
    if (static_cast<int>(io::parse_number(row[end])) != s0 + sc.shift_length)
      throw io::CsvError("roster: end_step must be start_step + delta");
    if (roster.drivers.size() <= d) roster.drivers.resize(d + 1);
    if (roster.drivers[d].size() != i) throw io::CsvError("roster: shift_index out of order");
    roster.drivers[d].push_back(extended_shift(s0, sc));
  }
  return roster;
}

// ---------------------------------------------------------------------------
// Command driver

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out;  // overrides the config's "output"
  std::optional<std::uint64_t> seed;
  std::optional<double> rel_gap;  // overrides the config's "rel_gap"
};

inline std::filesystem::path output_dir(const ExperimentSpec& spec, const CommandOptions& o) {
  if (!o.out.empty()) return o.out;
  if (!spec.output.empty()) return spec.output;
  return ".";
}

/// Runs one subcommand; returns the process exit code. Messages go to
/// `log` (progress) and `err` (failures).
inline int run_command(const std::string& command, const CommandOptions& o, std::ostream& log = std::cout,
                       std::ostream& err = std::cerr) {
  try {
    const ExperimentSpec spec = load_experiment(o.config);
    const auto dir = output_dir(spec, o);
    const auto opts = solver_options(o.rel_gap ? o.rel_gap : spec.rel_gap);

    if (command == "plan") {
      const PlanReport r = run_plan(spec.base, opts);
      io::write_files_atomic(plan_outputs(r, dir));
      log << "plan: status " << milp::to_string(r.result.solve_status) << ", sum_x " << r.result.plan.total()
          << ", reward " << r.result.true_reward << ", relative gap " << r.gap << "\n";
      return kExitOk;
    }
    if (command == "sweep") {
      if (!is_sweep(spec.kind)) throw io::ConfigError("config: sweep needs a sweep_* experiment");
      const auto points = run_sweep(spec, opts);
      io::write_files_atomic(sweep_outputs(points, dir));
      for (const auto& p : points) log << "sweep " << p.value << ": relative gap " << p.report.gap << "\n";
      return kExitOk;
    }
    if (command == "compare") {
      if (spec.kind != ExperimentKind::CompareBaselines)
        throw io::ConfigError("config: compare needs a compare_baselines experiment");
      const auto rep = run_compare(spec, opts);
      io::write_files_atomic(compare_outputs(rep, dir));
      for (const auto& p : rep.points)
        log << "compare N=" << p.drivers << ": ours " << p.gap_ours << ", service " << p.gap_service << ", economic "
            << p.gap_economic << "\n";
      return kExitOk;
    }
    if (command == "roster") {
      const ShiftPlan plan_in = spec.plan ? *spec.plan : plan(spec.base, opts).plan;
      const auto bundle = run_roster(spec.base, plan_in);
      RosterReport check = bundle.check;
      if (check.ok && o.seed) {
        const RosterReport extra = roster_self_check(spec.base, plan_in, *o.seed);
        if (!extra.ok) check = extra;
      }
      if (!check.ok) {
        for (const auto& v : check.violations)
          err << "roster violation (" << to_string(v.kind) << ")"
              << (v.driver >= 0 ? " driver " + std::to_string(v.driver) : std::string()) << ": " << v.detail << "\n";
        return kExitRoster;
      }
      io::write_file_atomic(dir / "roster.csv", io::to_csv_text(roster_table(bundle.roster, spec.base)));
      log << "roster: " << bundle.roster.drivers.size() << " drivers, " << bundle.swaps.size() << " swaps\n";
      return kExitOk;
    }
    if (command == "export-lp") {
      io::write_file_atomic(dir / "model.lp", milp::export_lp(build_reward_mip(spec.base)));
      log << "export-lp: wrote " << (dir / "model.lp").string() << "\n";
      return kExitOk;
    }
    err << "unknown command: " << command << "\n";
    return kExitUsage;
  } catch (const io::ConfigError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const PlanningError& e) {
    err << e.what() << "\n";
    return kExitInfeasible;
  } catch (const io::IoError& e) {
    err << e.what() << "\n";
    return kExitIo;
  } catch (const io::CsvError& e) {
    err << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace shiftplan::cli
