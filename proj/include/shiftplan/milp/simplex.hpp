#pragma once

// Revised bounded-variable primal simplex.
//
// Every row i gets a logical variable s_i = a_i . v whose bounds encode the
// row sense, so the working system is A v - s = 0 with all variables boxed
// (possibly by infinite bounds). The basis is factored with a sparse LU and
// updated in product form between refactorizations. Phase 1 minimizes the sum
// of bound violations of the basic variables, which lets any basis, in
// particular a parent's optimal basis in branch-and-bound, serve as a start.
//
// Pricing is Dantzig's rule with a two-pass Harris ratio test. After
// SimplexOptions::degenerate_limit consecutive degenerate pivots it switches
// to Bland's rule until the objective moves again.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "shiftplan/milp/model.hpp"

namespace shiftplan::milp {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

struct Basis {
  std::vector<int> head;        // basic variable of each row
  std::vector<VarState> state;  // structural variables first, then logicals
};

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  int degenerate_limit = 1000;
  long iteration_limit = 5'000'000;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;  // structural variables
  double objective = 0.0;      // maximization sense, c . v
  // Minimization form (min -c . v): row duals and reduced costs of all
  // structural and logical variables at the final basis.
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  Basis basis;
  long iterations = 0;
  long bland_pivots = 0;
};

/// Column-compressed constraint matrix with row bounds. Rows without
/// nonzeros are dropped; if one of them cannot hold, `empty_row_infeasible`
/// is set.
class LpForm {
 public:
  explicit LpForm(const MilpModel& model) {
    model.validate();
    n_ = model.num_vars();
    cost_.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) cost_[static_cast<std::size_t>(j)] = -model.objective[static_cast<std::size_t>(j)];
    lower_ = model.lower;
    upper_ = model.upper;

    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(n_));
    std::vector<Term> terms;
    for (int i = 0; i < model.num_rows(); ++i) {
      const Row& row = model.rows[static_cast<std::size_t>(i)];
      terms = row.terms;
      std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
      const int r = static_cast<int>(row_lower_.size());
      bool any = false;
      for (std::size_t k = 0; k < terms.size();) {
        const int var = terms[k].var;
        double coef = 0.0;
        for (; k < terms.size() && terms[k].var == var; ++k) coef += terms[k].coef;
        if (coef != 0.0) {
          cols[static_cast<std::size_t>(var)].emplace_back(r, coef);
          any = true;
        }
      }
      if (!any) {
        const bool ok = (row.sense == Sense::LessEqual && 0.0 <= row.rhs) ||
                        (row.sense == Sense::GreaterEqual && 0.0 >= row.rhs) ||
                        (row.sense == Sense::Equal && row.rhs == 0.0);
        if (!ok) empty_row_infeasible_ = true;
        continue;
      }
      row_origin_.push_back(i);
      row_lower_.push_back(row.sense == Sense::LessEqual ? -kInf : row.rhs);
      row_upper_.push_back(row.sense == Sense::GreaterEqual ? kInf : row.rhs);
    }
    m_ = static_cast<int>(row_lower_.size());
    col_start_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int j = 0; j < n_; ++j) {
      col_start_[static_cast<std::size_t>(j) + 1] =
          col_start_[static_cast<std::size_t>(j)] + static_cast<int>(cols[static_cast<std::size_t>(j)].size());
      for (auto [r, v] : cols[static_cast<std::size_t>(j)]) {
        row_index_.push_back(r);
        value_.push_back(v);
      }
    }
  }

  int num_cols() const { return n_; }
  int num_rows() const { return m_; }
  bool empty_row_infeasible() const { return empty_row_infeasible_; }
  std::span<const double> cost() const { return cost_; }
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }
  std::span<const double> row_lower() const { return row_lower_; }
  std::span<const double> row_upper() const { return row_upper_; }
  /// Original model row of each kept row.
  std::span<const int> row_origin() const { return row_origin_; }

  int col_begin(int j) const { return col_start_[static_cast<std::size_t>(j)]; }
  int col_end(int j) const { return col_start_[static_cast<std::size_t>(j) + 1]; }
  int row_at(int k) const { return row_index_[static_cast<std::size_t>(k)]; }
  double value_at(int k) const { return value_[static_cast<std::size_t>(k)]; }

 private:
  int n_ = 0;
  int m_ = 0;
  bool empty_row_infeasible_ = false;
  std::vector<double> cost_, lower_, upper_, row_lower_, row_upper_;
  std::vector<int> row_origin_;
  std::vector<int> col_start_, row_index_;
  std::vector<double> value_;
};

class BoundedSimplex {
 public:
  explicit BoundedSimplex(const LpForm& form, SimplexOptions opts = {})
      : form_(form), opts_(opts), n_(form.num_cols()), m_(form.num_rows()), total_(n_ + m_) {}

  /// Solves with the given structural bounds, starting from `warm` when it
  /// has the right shape (the slack basis otherwise).
  LpResult solve(std::span<const double> col_lower, std::span<const double> col_upper,
                 const Basis* warm = nullptr) {
    if (col_lower.size() != static_cast<std::size_t>(n_) || col_upper.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("simplex: bound vectors have wrong length");
    LpResult result;
    lo_.assign(static_cast<std::size_t>(total_), 0.0);
    hi_.assign(static_cast<std::size_t>(total_), 0.0);
    cost_.assign(static_cast<std::size_t>(total_), 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[idx(j)] = col_lower[idx(j)];
      hi_[idx(j)] = col_upper[idx(j)];
      cost_[idx(j)] = form_.cost()[idx(j)];
    }
    for (int i = 0; i < m_; ++i) {
      lo_[idx(n_ + i)] = form_.row_lower()[idx(i)];
      hi_[idx(n_ + i)] = form_.row_upper()[idx(i)];
    }
    if (form_.empty_row_infeasible()) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    for (int j = 0; j < total_; ++j)
      if (lo_[idx(j)] > hi_[idx(j)] + opts_.primal_tol) {
        result.status = LpStatus::Infeasible;
        return result;
      }
    x_.assign(idx(total_), 0.0);

    const bool warm_ok = warm != nullptr && warm->head.size() == static_cast<std::size_t>(m_) &&
                         warm->state.size() == static_cast<std::size_t>(total_);
    if (warm_ok) {
      head_ = warm->head;
      state_ = warm->state;
    } else {
      slack_basis();
    }
    for (int j = 0; j < total_; ++j)
      if (state_[idx(j)] != VarState::Basic) normalize_nonbasic(j);
    if (!factorize()) {
      slack_basis();
      if (!factorize()) throw std::logic_error("simplex: slack basis is singular");
    }
    compute_basic_values();
    return iterate(result);
  }

 private:
  static std::size_t idx(int i) { return static_cast<std::size_t>(i); }

  void slack_basis() {
    head_.resize(idx(m_));
    state_.assign(idx(total_), VarState::AtLower);
    for (int i = 0; i < m_; ++i) {
      head_[idx(i)] = n_ + i;
      state_[idx(n_ + i)] = VarState::Basic;
    }
    for (int j = 0; j < n_; ++j) normalize_nonbasic(j);
  }

  void normalize_nonbasic(int j) {
    const double lo = lo_[idx(j)], hi = hi_[idx(j)];
    VarState& st = state_[idx(j)];
    if (st == VarState::Basic) st = VarState::AtLower;
    if (st == VarState::AtUpper && hi == kInf) st = VarState::AtLower;
    if (st == VarState::FreeZero && lo > -kInf) st = VarState::AtLower;
    if (st == VarState::AtLower && lo == -kInf) st = hi < kInf ? VarState::AtUpper : VarState::FreeZero;
    x_[idx(j)] = st == VarState::AtLower ? lo : st == VarState::AtUpper ? hi : 0.0;
  }

  template <class F>
  void for_column(int j, F&& f) const {
    if (j < n_) {
      for (int k = form_.col_begin(j); k < form_.col_end(j); ++k) f(form_.row_at(k), form_.value_at(k));
    } else {
      f(j - n_, -1.0);
    }
  }

  double column_dot(int j, const Eigen::VectorXd& v) const {
    if (j >= n_) return -v[j - n_];
    double s = 0.0;
    for (int k = form_.col_begin(j); k < form_.col_end(j); ++k) s += form_.value_at(k) * v[form_.row_at(k)];
    return s;
  }

  bool factorize() {
    etas_.clear();
    if (m_ == 0) return true;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(idx(m_) * 2);
    for (int i = 0; i < m_; ++i)
      for_column(head_[idx(i)], [&](int r, double v) { trips.emplace_back(r, i, v); });
    Eigen::SparseMatrix<double> basis(m_, m_);
    basis.setFromTriplets(trips.begin(), trips.end());
    basis.makeCompressed();
    lu_.analyzePattern(basis);
    lu_.factorize(basis);
    if (lu_.info() != Eigen::Success) return false;
    // SparseLU accepts numerically singular matrices; catch them here.
    const double log_det = lu_.logAbsDeterminant();
    return std::isfinite(log_det);
  }

  void ftran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    v = lu_.solve(v);
    for (const Eta& e : etas_) {
      const double pivot_value = v[e.row] / e.pivot;
      if (pivot_value != 0.0)
        for (auto [i, a] : e.entries) v[i] -= a * pivot_value;
      v[e.row] = pivot_value;
    }
  }

  void btran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->row];
      for (auto [i, a] : it->entries) s -= a * v[i];
      v[it->row] = s / it->pivot;
    }
    v = lu_.transpose().solve(v);
  }

  void compute_basic_values() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < total_; ++j) {
      if (state_[idx(j)] == VarState::Basic) continue;
      const double xj = x_[idx(j)];
      if (xj != 0.0) for_column(j, [&](int r, double v) { rhs[r] -= v * xj; });
    }
    ftran(rhs);
    for (int i = 0; i < m_; ++i) x_[idx(head_[idx(i)])] = rhs[i];
  }

  double objective_of_x() const {
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[idx(j)] * x_[idx(j)];
    return obj;
  }

  double feas_tol(double bound) const { return opts_.primal_tol * std::max(1.0, std::abs(bound)); }
  bool below(int j) const { return x_[idx(j)] < lo_[idx(j)] - feas_tol(lo_[idx(j)]); }
  bool above(int j) const { return x_[idx(j)] > hi_[idx(j)] + feas_tol(hi_[idx(j)]); }

  struct Eta {
    int row;
    double pivot;
    std::vector<std::pair<int, double>> entries;
  };

  LpResult& iterate(LpResult& result) {
    Eigen::VectorXd basic_cost(m_), pi(m_), alpha(m_);
    std::vector<char> rejected(idx(total_), 0);
    bool any_rejected = false;
    bool fresh = true;  // x_B was recomputed from a new factorization
    long degenerate_run = 0;
    bool bland = false;
    bool best_in_phase2 = false;
    double best_measure = -kInf;

    for (;;) {
      if (result.iterations >= opts_.iteration_limit) return finish(result, LpStatus::IterationLimit);

      bool infeasible = false;
      double infeasibility = 0.0;
      for (int i = 0; i < m_; ++i) {
        const int j = head_[idx(i)];
        if (below(j)) {
          basic_cost[i] = -1.0;
          infeasible = true;
          infeasibility += lo_[idx(j)] - x_[idx(j)];
        } else if (above(j)) {
          basic_cost[i] = 1.0;
          infeasible = true;
          infeasibility += x_[idx(j)] - hi_[idx(j)];
        } else {
          basic_cost[i] = 0.0;
        }
      }
      if (!infeasible)
        for (int i = 0; i < m_; ++i) basic_cost[i] = cost_[idx(head_[idx(i)])];

      // Stall detection on the phase objective: a pivot counts as degenerate
      // unless it reaches phase 2 or improves the best value seen so far.
      const double measure = infeasible ? -infeasibility : -objective_of_x();
      const bool improved = measure > best_measure + 1e-11 * (1.0 + std::abs(best_measure));
      const bool progress = infeasible ? !best_in_phase2 && improved : !best_in_phase2 || improved;
      if (progress) {
        best_in_phase2 = !infeasible;
        best_measure = measure;
        degenerate_run = 0;
        bland = false;
      } else if (result.iterations > 0 && ++degenerate_run >= opts_.degenerate_limit) {
        bland = true;
      }
      pi = basic_cost;
      btran(pi);

      // Pricing.
      int entering = -1;
      double dir = 0.0;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        const VarState st = state_[idx(j)];
        if (st == VarState::Basic || rejected[idx(j)] || lo_[idx(j)] == hi_[idx(j)]) continue;
        const double d = (infeasible ? 0.0 : cost_[idx(j)]) - column_dot(j, pi);
        double step_dir = 0.0;
        if (st == VarState::AtLower && d < -opts_.dual_tol) step_dir = 1.0;
        else if (st == VarState::AtUpper && d > opts_.dual_tol) step_dir = -1.0;
        else if (st == VarState::FreeZero && std::abs(d) > opts_.dual_tol) step_dir = d < 0.0 ? 1.0 : -1.0;
        if (step_dir == 0.0) continue;
        if (bland) {
          entering = j;
          dir = step_dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
          dir = step_dir;
        }
      }

      if (entering < 0) {
        if (!fresh) {
          refresh();
          fresh = true;
          std::fill(rejected.begin(), rejected.end(), 0);
          any_rejected = false;
          continue;
        }
        return finish(result, infeasible ? LpStatus::Infeasible : LpStatus::Optimal);
      }

      alpha.setZero();
      for_column(entering, [&](int r, double v) { alpha[r] = v; });
      ftran(alpha);

      // Ratio test. Basic variable i moves at rate -dir * alpha_i.
      const double range = hi_[idx(entering)] - lo_[idx(entering)];
      double theta_max = kInf;
      auto candidate = [&](int i, double& dist, double& rate, bool& to_lower) -> bool {
        const double a = alpha[i];
        if (std::abs(a) < opts_.pivot_tol) return false;
        rate = -dir * a;
        const int j = head_[idx(i)];
        const double v = x_[idx(j)], lo = lo_[idx(j)], hi = hi_[idx(j)];
        if (infeasible && below(j)) {
          if (rate <= 0.0) return false;
          dist = lo - v;
          to_lower = true;
          return true;
        }
        if (infeasible && above(j)) {
          if (rate >= 0.0) return false;
          dist = v - hi;
          to_lower = false;
          return true;
        }
        if (rate < 0.0 && lo > -kInf) {
          dist = v - lo;
          to_lower = true;
          return true;
        }
        if (rate > 0.0 && hi < kInf) {
          dist = hi - v;
          to_lower = false;
          return true;
        }
        return false;
      };

      int leave_row = -1;
      bool leave_to_lower = true;
      double theta = 0.0;
      if (!bland) {
        for (int i = 0; i < m_; ++i) {
          double dist, rate;
          bool to_lower;
          if (!candidate(i, dist, rate, to_lower)) continue;
          const int j = head_[idx(i)];
          const double tol = feas_tol(to_lower ? lo_[idx(j)] : hi_[idx(j)]);
          // A variable already inside the tolerance band may only use what is left of it.
          theta_max = std::min(theta_max, std::max(dist + tol, 0.0) / std::abs(rate));
        }
        if (range <= theta_max) {
          theta = range;
        } else if (theta_max < kInf) {
          double best_pivot = 0.0;
          for (int i = 0; i < m_; ++i) {
            double dist, rate;
            bool to_lower;
            if (!candidate(i, dist, rate, to_lower)) continue;
            const double ratio = std::max(dist, 0.0) / std::abs(rate);
            if (ratio <= theta_max && std::abs(alpha[i]) > best_pivot) {
              best_pivot = std::abs(alpha[i]);
              leave_row = i;
              leave_to_lower = to_lower;
              theta = ratio;
            }
          }
        }
      } else {
        double min_ratio = kInf;
        for (int i = 0; i < m_; ++i) {
          double dist, rate;
          bool to_lower;
          if (candidate(i, dist, rate, to_lower)) min_ratio = std::min(min_ratio, std::max(dist, 0.0) / std::abs(rate));
        }
        if (range <= min_ratio) {
          theta = range;
        } else if (min_ratio < kInf) {
          const double cutoff = min_ratio + 1e-12 * (1.0 + min_ratio);
          for (int i = 0; i < m_; ++i) {
            double dist, rate;
            bool to_lower;
            if (!candidate(i, dist, rate, to_lower)) continue;
            if (std::max(dist, 0.0) / std::abs(rate) > cutoff) continue;
            if (leave_row < 0 || head_[idx(i)] < head_[idx(leave_row)]) {
              leave_row = i;
              leave_to_lower = to_lower;
            }
          }
          theta = min_ratio;
        }
      }

      const bool bound_flip = leave_row < 0 && range < kInf && theta == range;
      if (leave_row < 0 && !bound_flip) {
        if (!fresh) {
          refresh();
          fresh = true;
          continue;
        }
        if (!infeasible) return finish(result, LpStatus::Unbounded);
        rejected[idx(entering)] = 1;
        any_rejected = true;
        ++result.iterations;
        continue;
      }

      ++result.iterations;
      if (bland) ++result.bland_pivots;

      if (theta != 0.0) {
        for (int i = 0; i < m_; ++i)
          if (alpha[i] != 0.0) x_[idx(head_[idx(i)])] -= theta * dir * alpha[i];
        x_[idx(entering)] += theta * dir;
      }
      fresh = false;

      if (bound_flip) {
        state_[idx(entering)] = dir > 0.0 ? VarState::AtUpper : VarState::AtLower;
        x_[idx(entering)] = dir > 0.0 ? hi_[idx(entering)] : lo_[idx(entering)];
        continue;
      }

      const int leaving = head_[idx(leave_row)];
      state_[idx(leaving)] = leave_to_lower ? VarState::AtLower : VarState::AtUpper;
      x_[idx(leaving)] = leave_to_lower ? lo_[idx(leaving)] : hi_[idx(leaving)];
      head_[idx(leave_row)] = entering;
      state_[idx(entering)] = VarState::Basic;

      Eta eta{leave_row, alpha[leave_row], {}};
      for (int i = 0; i < m_; ++i)
        if (i != leave_row && alpha[i] != 0.0) eta.entries.emplace_back(i, alpha[i]);
      etas_.push_back(std::move(eta));
      if (any_rejected) {
        std::fill(rejected.begin(), rejected.end(), 0);
        any_rejected = false;
      }
      if (static_cast<int>(etas_.size()) >= opts_.refactor_interval) {
        refresh();
        fresh = true;
      }
    }
  }

  void refresh() {
    if (!factorize()) {
      slack_basis();
      if (!factorize()) throw std::logic_error("simplex: slack basis is singular");
    }
    compute_basic_values();
  }

  LpResult& finish(LpResult& result, LpStatus status) {
    result.status = status;
    result.values.assign(x_.begin(), x_.begin() + n_);
    result.objective = -objective_of_x();

    Eigen::VectorXd pi(m_);
    for (int i = 0; i < m_; ++i) pi[i] = cost_[idx(head_[idx(i)])];
    btran(pi);
    result.duals.assign(idx(m_), 0.0);
    for (int i = 0; i < m_; ++i) result.duals[idx(i)] = pi[i];
    result.reduced_costs.assign(idx(total_), 0.0);
    for (int j = 0; j < total_; ++j)
      if (state_[idx(j)] != VarState::Basic) result.reduced_costs[idx(j)] = cost_[idx(j)] - column_dot(j, pi);
    result.basis.head = head_;
    result.basis.state = state_;
    return result;
  }

  const LpForm& form_;
  SimplexOptions opts_;
  int n_, m_, total_;
  std::vector<double> lo_, hi_, x_, cost_;
  std::vector<int> head_;
  std::vector<VarState> state_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
};

/// LP relaxation of `model` (integrality ignored).
inline MilpSolution lp_solve(const MilpModel& model, const SimplexOptions& opts = {}) {
  const LpForm form(model);
  BoundedSimplex simplex(form, opts);
  const LpResult lp = simplex.solve(model.lower, model.upper);
  MilpSolution out;
  out.nodes_explored = 0;
  out.simplex_iterations = lp.iterations;
  switch (lp.status) {
    case LpStatus::Optimal:
      out.status = SolveStatus::Optimal;
      out.values = lp.values;
      out.objective = lp.objective;
      out.best_bound = lp.objective;
      break;
    case LpStatus::Infeasible:
      out.status = SolveStatus::Infeasible;
      break;
    case LpStatus::Unbounded:
      out.status = SolveStatus::Unbounded;
      out.objective = kInf;
      out.best_bound = kInf;
      break;
    case LpStatus::IterationLimit:
      throw std::runtime_error("lp_solve: simplex iteration limit reached");
  }
  return out;
}

}  // namespace shiftplan::milp
