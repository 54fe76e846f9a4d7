#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shiftplan::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  std::string name;
};

/// Linear model "maximize objective . v" over rows and variable bounds, with an
/// integrality mask. Columns are added through add_variable().
struct MilpModel {
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integer;
  std::vector<std::string> names;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_variable(std::string name, double lo, double hi, double obj, bool is_integer) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    integer.push_back(is_integer);
    names.push_back(std::move(name));
    return num_vars() - 1;
  }

  int add_row(std::vector<Term> terms, Sense sense, double rhs, std::string name = {}) {
    rows.push_back({std::move(terms), sense, rhs, std::move(name)});
    return num_rows() - 1;
  }

  void validate() const {
    const auto n = objective.size();
    if (lower.size() != n || upper.size() != n || integer.size() != n || names.size() != n)
      throw std::invalid_argument("model: per-variable arrays differ in length");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(objective[j]))
        throw std::invalid_argument("model: non-finite objective coefficient on " + names[j]);
      if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] == kInf || upper[j] == -kInf)
        throw std::invalid_argument("model: invalid bound on " + names[j]);
      if (lower[j] > upper[j]) throw std::invalid_argument("model: lower > upper on " + names[j]);
    }
    for (const auto& row : rows) {
      if (!std::isfinite(row.rhs)) throw std::invalid_argument("model: non-finite rhs in row " + row.name);
      for (const auto& term : row.terms) {
        if (term.var < 0 || static_cast<std::size_t>(term.var) >= n)
          throw std::invalid_argument("model: row " + row.name + " references unknown variable");
        if (!std::isfinite(term.coef))
          throw std::invalid_argument("model: non-finite coefficient in row " + row.name);
      }
    }
  }

  double objective_value(std::span<const double> v) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < objective.size(); ++j) sum += objective[j] * v[j];
    return sum;
  }

  double activity(const Row& row, std::span<const double> v) const {
    double sum = 0.0;
    for (const auto& term : row.terms) sum += term.coef * v[static_cast<std::size_t>(term.var)];
    return sum;
  }

  /// Largest row violation scaled by 1 + |rhs|.
  double max_scaled_row_violation(std::span<const double> v) const {
    double worst = 0.0;
    for (const auto& row : rows) {
      const double act = activity(row, v);
      double viol = 0.0;
      if (row.sense != Sense::GreaterEqual) viol = std::max(viol, act - row.rhs);
      if (row.sense != Sense::LessEqual) viol = std::max(viol, row.rhs - act);
      worst = std::max(worst, viol / (1.0 + std::abs(row.rhs)));
    }
    return worst;
  }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, GapLimit, NodeLimit };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::GapLimit: return "gap_limit";
    case SolveStatus::NodeLimit: return "node_limit";
  }
  return "unknown";
}

/// One entry per processed branch-and-bound node.
struct NodeTrace {
  long node = 0;
  double incumbent = -kInf;
  double best_bound = kInf;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;
  double objective = -kInf;
  double best_bound = -kInf;
  long nodes_explored = 0;
  long simplex_iterations = 0;
  std::vector<NodeTrace> trace;  // filled only when requested

  bool has_solution() const { return !values.empty(); }
};

}  // namespace shiftplan::milp
