#pragma once

// Best-bound branch-and-bound over the bounded simplex.
//
// Open nodes are ordered by their bound (the parent's LP value), then by
// depth (deepest first), then by creation order. Bounds are compared after
// quantizing to 1e-9 relative to the root LP value so that round-off noise
// does not break ties. Each child starts its LP from the parent's optimal
// basis. The variable to branch on is the most fractional integer variable,
// lowest index on ties; the down child is created before the up child.

#include <cmath>
#include <memory>
#include <queue>
#include <stdexcept>
#include <vector>

#include "shiftplan/milp/model.hpp"
#include "shiftplan/milp/simplex.hpp"

namespace shiftplan::milp {

struct MilpOptions {
  double abs_gap = 1e-6;
  double rel_gap = 1e-6;
  long node_limit = 1'000'000;
  bool record_trace = false;
  SimplexOptions lp;
};

inline constexpr double kIntegralityTol = 1e-6;

/// Gap at which a solve is reported Optimal regardless of user options.
inline constexpr double kOptimalGap = 1e-6;

namespace detail {

struct BranchRecord {
  int var;
  double lower;
  double upper;
  std::shared_ptr<const BranchRecord> parent;
};

struct OpenNode {
  double bound;
  long long bound_key;
  int depth;
  long seq;
  std::shared_ptr<const BranchRecord> branch;
  std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    // priority_queue pops the largest element: best bound, deepest, oldest.
    if (a.bound_key != b.bound_key) return a.bound_key < b.bound_key;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

inline bool gap_closed(double incumbent, double bound, double abs_gap, double rel_gap) {
  if (incumbent == -kInf) return false;
  const double gap = bound - incumbent;
  return gap <= abs_gap || gap <= rel_gap * std::abs(incumbent);
}

}  // namespace detail

inline MilpSolution milp_solve(const MilpModel& model, const MilpOptions& opts = {}) {
  using detail::BranchRecord;
  const LpForm form(model);
  for (int j = 0; j < model.num_vars(); ++j)
    if (model.integer[static_cast<std::size_t>(j)] &&
        (!std::isfinite(model.lower[static_cast<std::size_t>(j)]) || !std::isfinite(model.upper[static_cast<std::size_t>(j)])))
      throw std::invalid_argument("milp_solve: integer variable " + model.names[static_cast<std::size_t>(j)] +
                                  " needs finite bounds");

  BoundedSimplex simplex(form, opts.lp);
  MilpSolution out;
  const auto n = static_cast<std::size_t>(model.num_vars());

  std::vector<double> lower(n), upper(n);
  auto apply_branches = [&](const std::shared_ptr<const BranchRecord>& rec) {
    lower = model.lower;
    upper = model.upper;
    // Records nearer the leaf are tighter, so apply from leaf to root taking
    // the intersection.
    for (const BranchRecord* r = rec.get(); r != nullptr; r = r->parent.get()) {
      auto j = static_cast<std::size_t>(r->var);
      lower[j] = std::max(lower[j], r->lower);
      upper[j] = std::min(upper[j], r->upper);
    }
  };

  double incumbent = -kInf;
  double best_bound = kInf;
  std::priority_queue<detail::OpenNode, std::vector<detail::OpenNode>, detail::NodeOrder> open;
  double quantum = 1e-9;
  long seq = 0;
  bool have_root = false;

  auto key_of = [&](double bound) { return static_cast<long long>(std::llround(bound / quantum)); };

  std::shared_ptr<const BranchRecord> branch;
  std::shared_ptr<const Basis> warm;
  double node_bound = kInf;
  int depth = 0;

  for (;;) {
    if (have_root) {
      if (open.empty()) break;
      const double top = open.top().bound;
      best_bound = std::min(best_bound, std::max(top, incumbent));
      if (top <= incumbent || detail::gap_closed(incumbent, top, opts.abs_gap, opts.rel_gap)) break;
      if (out.nodes_explored >= opts.node_limit) {
        out.status = SolveStatus::NodeLimit;
        out.best_bound = best_bound;
        out.objective = incumbent;
        return out;
      }
      const detail::OpenNode node = open.top();
      open.pop();
      branch = node.branch;
      warm = node.basis;
      node_bound = node.bound;
      depth = node.depth;
    }

    apply_branches(branch);
    LpResult lp = simplex.solve(lower, upper, warm.get());
    ++out.nodes_explored;
    out.simplex_iterations += lp.iterations;

    if (!have_root) {
      have_root = true;
      if (lp.status == LpStatus::Infeasible) {
        out.status = SolveStatus::Infeasible;
        return out;
      }
      if (lp.status == LpStatus::Unbounded) {
        out.status = SolveStatus::Unbounded;
        out.objective = kInf;
        out.best_bound = kInf;
        return out;
      }
      if (lp.status == LpStatus::IterationLimit) throw std::runtime_error("milp_solve: root LP hit the iteration limit");
      quantum = 1e-9 * std::max(1.0, std::abs(lp.objective));
      best_bound = lp.objective;
    } else if (lp.status == LpStatus::IterationLimit) {
      throw std::runtime_error("milp_solve: node LP hit the iteration limit");
    }

    auto record = [&] {
      if (opts.record_trace) {
        const double open_bound = open.empty() ? incumbent : std::max(open.top().bound, incumbent);
        best_bound = std::min(best_bound, std::max(open_bound, incumbent));
        out.trace.push_back({out.nodes_explored, incumbent, best_bound});
      }
    };

    if (lp.status != LpStatus::Optimal) {  // infeasible subtree
      record();
      continue;
    }
    const double value = std::min(lp.objective, node_bound);
    if (value <= incumbent || detail::gap_closed(incumbent, value, opts.abs_gap, opts.rel_gap)) {
      record();
      continue;
    }

    int branch_var = -1;
    double best_frac = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!model.integer[j]) continue;
      const double v = lp.values[j];
      const double frac = v - std::floor(v);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist > kIntegralityTol && dist > best_frac) {
        best_frac = dist;
        branch_var = static_cast<int>(j);
      }
    }

    if (branch_var < 0) {
      incumbent = lp.objective;
      out.values = lp.values;
      out.objective = lp.objective;
      record();
      continue;
    }

    auto basis = std::make_shared<const Basis>(std::move(lp.basis));
    const double v = lp.values[static_cast<std::size_t>(branch_var)];
    const auto key = key_of(value);
    auto down = std::make_shared<const BranchRecord>(
        BranchRecord{branch_var, -kInf, std::floor(v), branch});
    auto up = std::make_shared<const BranchRecord>(
        BranchRecord{branch_var, std::ceil(v), kInf, branch});
    open.push({value, key, depth + 1, seq++, std::move(down), basis});
    open.push({value, key, depth + 1, seq++, std::move(up), basis});
    record();
  }

  if (incumbent == -kInf) {
    out.status = SolveStatus::Infeasible;
    out.best_bound = -kInf;
    return out;
  }
  best_bound = std::max(incumbent, open.empty() ? incumbent : std::min(best_bound, open.top().bound));
  out.best_bound = best_bound;
  out.objective = incumbent;
  out.status = detail::gap_closed(incumbent, best_bound, kOptimalGap, kOptimalGap) ? SolveStatus::Optimal
                                                                                 : SolveStatus::GapLimit;
  return out;
}

}  // namespace shiftplan::milp
