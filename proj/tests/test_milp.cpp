#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>

#include "oracles.hpp"
#include "shiftplan/milp/branch_and_bound.hpp"
#include "shiftplan/milp/lp_format.hpp"
#include "shiftplan/milp/simplex.hpp"

using namespace shiftplan::milp;

namespace {

MilpModel two_var_lp() {
  MilpModel m;
  m.add_variable("v1", 0, kInf, 2, false);
  m.add_variable("v2", 0, kInf, 1, false);
  m.add_row({{0, 1}}, Sense::LessEqual, 1);
  m.add_row({{1, 1}}, Sense::LessEqual, 1);
  m.add_row({{0, 1}, {1, 1}}, Sense::LessEqual, 1.5);
  return m;
}

MilpModel knapsack_pair() {
  MilpModel m;
  m.add_variable("v1", 0, 6, 5, true);
  m.add_variable("v2", 0, 6, 4, true);
  m.add_row({{0, 6}, {1, 4}}, Sense::LessEqual, 24);
  m.add_row({{0, 1}, {1, 2}}, Sense::LessEqual, 6);
  return m;
}

/// Random model with integer variables in small boxes and mixed row senses.
MilpModel random_model(std::mt19937_64& rng, bool all_integer) {
  std::uniform_int_distribution<int> nvar(1, 6), nrow(1, 5), coef(-5, 5), lo(-3, 2), width(0, 6);
  MilpModel m;
  const int n = nvar(rng);
  for (int j = 0; j < n; ++j) {
    const double l = lo(rng);
    m.add_variable("v" + std::to_string(j), l, l + width(rng), coef(rng), all_integer || j % 2 == 0);
  }
  const int rows = nrow(rng);
  for (int i = 0; i < rows; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j)
      if (int c = coef(rng); c != 0) terms.push_back({j, static_cast<double>(c)});
    const int s = std::uniform_int_distribution<int>(0, 2)(rng);
    const Sense sense = s == 0 ? Sense::LessEqual : s == 1 ? Sense::GreaterEqual : Sense::Equal;
    double rhs = std::uniform_int_distribution<int>(-6, 10)(rng);
    if (sense == Sense::GreaterEqual) rhs = -rhs;
    m.add_row(std::move(terms), sense, rhs);
  }
  return m;
}

void expect_primal_feasible(const MilpModel& m, const std::vector<double>& v) {
  ASSERT_EQ(v.size(), static_cast<std::size_t>(m.num_vars()));
  EXPECT_LE(m.max_scaled_row_violation(v), 1e-7);
  for (int j = 0; j < m.num_vars(); ++j) {
    EXPECT_GE(v[static_cast<std::size_t>(j)], m.lower[static_cast<std::size_t>(j)] - 1e-9);
    EXPECT_LE(v[static_cast<std::size_t>(j)], m.upper[static_cast<std::size_t>(j)] + 1e-9);
  }
}

}  // namespace

TEST(LpSolve, SingleBoundedVariable) {
  MilpModel m;
  m.add_variable("v1", 0, kInf, 1, false);
  m.add_row({{0, 1}}, Sense::LessEqual, 3);
  const auto s = lp_solve(m);
  EXPECT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 3.0, 1e-9);
}

TEST(LpSolve, FacetOptimum) {
  MilpModel m;
  m.add_variable("v1", 0, kInf, 1, false);
  m.add_variable("v2", 0, kInf, 1, false);
  m.add_row({{0, 1}, {1, 1}}, Sense::LessEqual, 1);
  EXPECT_NEAR(lp_solve(m).objective, 1.0, 1e-9);
}

TEST(LpSolve, TwoDimensionalVertex) {
  const auto s = lp_solve(two_var_lp());
  EXPECT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 2.5, 1e-9);
  EXPECT_NEAR(s.values[0], 1.0, 1e-9);
  EXPECT_NEAR(s.values[1], 0.5, 1e-9);
}

TEST(LpSolve, InfeasibleAndUnbounded) {
  MilpModel inf;
  inf.add_variable("v", 0, kInf, 1, false);
  inf.add_row({{0, 1}}, Sense::GreaterEqual, 2);
  inf.add_row({{0, 1}}, Sense::LessEqual, 1);
  EXPECT_EQ(lp_solve(inf).status, SolveStatus::Infeasible);

  MilpModel unb;
  unb.add_variable("v", 0, kInf, 1, false);
  unb.add_variable("w", 0, kInf, 0, false);
  unb.add_row({{0, 1}, {1, -1}}, Sense::LessEqual, 1);
  EXPECT_EQ(lp_solve(unb).status, SolveStatus::Unbounded);

  MilpModel empty_row;
  empty_row.add_variable("v", 0, 1, 1, false);
  empty_row.add_row({}, Sense::GreaterEqual, 1);
  EXPECT_EQ(lp_solve(empty_row).status, SolveStatus::Infeasible);
}

TEST(LpSolve, RejectsMalformedModels) {
  MilpModel m;
  m.add_variable("v", 2, 1, 1, false);
  EXPECT_THROW(lp_solve(m), std::invalid_argument);
  MilpModel r;
  r.add_variable("v", 0, 1, 1, false);
  r.add_row({{3, 1.0}}, Sense::LessEqual, 1);
  EXPECT_THROW(lp_solve(r), std::invalid_argument);
}

TEST(LpSolve, FreeAndNegativeVariables) {
  MilpModel m;  // max -|v - 2| style: max w, w <= v - 2 + 10, w <= -v + 2 + 10, v free
  m.add_variable("v", -kInf, kInf, 0, false);
  m.add_variable("w", -kInf, kInf, 1, false);
  m.add_row({{1, 1}, {0, -1}}, Sense::LessEqual, 8);
  m.add_row({{1, 1}, {0, 1}}, Sense::LessEqual, 12);
  const auto s = lp_solve(m);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 10.0, 1e-9);
  EXPECT_NEAR(s.values[0], 2.0, 1e-9);
}

TEST(LpSolve, OptimalityCertificateOnRandomLps) {
  std::mt19937_64 rng(21);
  int optimal = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const MilpModel m = random_model(rng, false);
    const LpForm form(m);
    BoundedSimplex sx(form);
    const LpResult r = sx.solve(m.lower, m.upper);
    if (r.status != LpStatus::Optimal) continue;
    ++optimal;
    expect_primal_feasible(m, r.values);
    // Reduced costs (minimization form) must point into the box: >= 0 at
    // lower bounds, <= 0 at upper bounds. Fixed variables, including the
    // logicals of equality rows, may carry either sign.
    const auto n = m.lower.size();
    for (std::size_t j = 0; j < r.basis.state.size(); ++j) {
      const bool fixed = j < n ? m.lower[j] == m.upper[j] : m.rows[j - n].sense == Sense::Equal;
      if (fixed) continue;
      const double d = r.reduced_costs[j];
      if (r.basis.state[j] == VarState::AtLower) {
        EXPECT_GE(d, -1e-7) << "variable " << j;
      }
      if (r.basis.state[j] == VarState::AtUpper) {
        EXPECT_LE(d, 1e-7) << "variable " << j;
      }
      if (r.basis.state[j] == VarState::FreeZero) {
        EXPECT_NEAR(d, 0.0, 1e-7);
      }
    }
    EXPECT_NEAR(r.objective, m.objective_value(r.values), 1e-9 * (1 + std::abs(r.objective)));
  }
  EXPECT_GT(optimal, 50);
}

TEST(LpSolve, BlandFallbackReachesSameOptimum) {
  std::mt19937_64 rng(22);
  SimplexOptions eager;
  eager.degenerate_limit = 1;
  for (int trial = 0; trial < 200; ++trial) {
    const MilpModel m = random_model(rng, false);
    const auto a = lp_solve(m), b = lp_solve(m, eager);
    ASSERT_EQ(a.status, b.status);
    if (a.status == SolveStatus::Optimal) {
      EXPECT_NEAR(a.objective, b.objective, 1e-7 * (1 + std::abs(a.objective)));
    }
  }
}

TEST(MilpSolve, IntegralRelaxationNeedsOneNode) {
  MilpModel m = two_var_lp();
  m.rows[2].rhs = 2.0;
  m.integer = {true, true};
  m.upper = {1.0, 1.0};
  const auto s = milp_solve(m);
  EXPECT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_EQ(s.nodes_explored, 1);
  EXPECT_NEAR(s.objective, 3.0, 1e-9);
}

TEST(MilpSolve, FloorOfFractionalBound) {
  MilpModel m;
  m.add_variable("v1", 0, 10, 1, true);
  m.add_row({{0, 2}}, Sense::LessEqual, 3);
  const auto s = milp_solve(m);
  EXPECT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-9);
}

TEST(MilpSolve, SmallIntegerProgramMatchesLatticeSearch) {
  const MilpModel m = knapsack_pair();
  const auto best = oracle::brute_force_milp(m);
  ASSERT_TRUE(best.has_value());
  const auto s = milp_solve(m);
  EXPECT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.objective, *best, 1e-9);
  EXPECT_NEAR(s.objective, 20.0, 1e-9);  // v = (4, 0); 24 is the rhs, not attainable
}

TEST(MilpSolve, RandomModelsMatchExhaustiveSearch) {
  std::mt19937_64 rng(23);
  int feasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const MilpModel m = random_model(rng, true);
    const auto best = oracle::brute_force_milp(m);
    const auto s = milp_solve(m);
    if (!best) {
      EXPECT_EQ(s.status, SolveStatus::Infeasible);
      continue;
    }
    ++feasible;
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    EXPECT_NEAR(s.objective, *best, 1e-6);
    expect_primal_feasible(m, s.values);
    for (double v : s.values) EXPECT_NEAR(v, std::round(v), 1e-6);
    EXPECT_LE(s.objective, s.best_bound + 1e-6 * (1 + std::abs(s.objective)));
  }
  EXPECT_GT(feasible, 50);
}

TEST(MilpSolve, DeterministicAndMonotoneTrace) {
  std::mt19937_64 rng(24);
  MilpOptions opts;
  opts.record_trace = true;
  for (int trial = 0; trial < 100; ++trial) {
    const MilpModel m = random_model(rng, true);
    const auto a = milp_solve(m, opts), b = milp_solve(m, opts);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.nodes_explored, b.nodes_explored);
    for (std::size_t i = 1; i < a.trace.size(); ++i) {
      EXPECT_GE(a.trace[i].incumbent, a.trace[i - 1].incumbent);
      EXPECT_LE(a.trace[i].best_bound, a.trace[i - 1].best_bound);
    }
  }
}

TEST(MilpSolve, NodeLimitStopsSearch) {
  MilpModel m;  // many equivalent fractional vertices
  for (int j = 0; j < 8; ++j) m.add_variable("v" + std::to_string(j), 0, 1, 1, true);
  std::vector<Term> terms;
  for (int j = 0; j < 8; ++j) terms.push_back({j, 2.0});
  m.add_row(terms, Sense::LessEqual, 7);
  MilpOptions opts;
  opts.node_limit = 2;
  const auto s = milp_solve(m, opts);
  EXPECT_EQ(s.status, SolveStatus::NodeLimit);
  EXPECT_EQ(s.nodes_explored, 2);
  EXPECT_EQ(milp_solve(m).status, SolveStatus::Optimal);
  EXPECT_NEAR(milp_solve(m).objective, 3.0, 1e-9);
}

TEST(MilpSolve, InfeasibleIntegerProgram) {
  MilpModel m;
  m.add_variable("v", 0, 5, 1, true);
  m.add_row({{0, 2}}, Sense::Equal, 3);
  EXPECT_EQ(milp_solve(m).status, SolveStatus::Infeasible);
}

TEST(MilpSolve, RequiresFiniteIntegerBounds) {
  MilpModel m;
  m.add_variable("v", 0, kInf, 1, true);
  EXPECT_THROW(milp_solve(m), std::invalid_argument);
}

TEST(ExportLp, EmptyModelHasAllSections) {
  const std::string text = export_lp(MilpModel{});
  for (const char* s : {"Maximize", "Subject To", "Bounds", "Generals", "End"})
    EXPECT_NE(text.find(s), std::string::npos) << s;
}

TEST(ExportLp, IntegerVariableListedUnderGenerals) {
  MilpModel m;
  m.add_variable("count", 0, 4, 1.5, true);
  m.add_row({{0, 1}}, Sense::LessEqual, 3, "cap");
  const std::string text = export_lp(m);
  const auto gen = text.find("Generals");
  ASSERT_NE(gen, std::string::npos);
  EXPECT_NE(text.find("count", gen), std::string::npos);
  EXPECT_NE(text.find(" cap: 1 count <= 3"), std::string::npos);
  EXPECT_NE(text.find("0 <= count <= 4"), std::string::npos);
}

TEST(ExportLp, NamesAreSanitizedAndUnique) {
  MilpModel m;
  m.add_variable("e1", -kInf, kInf, 1, false);
  m.add_variable("a b", 2, 2, 1, false);
  m.add_variable("a_b", 0, kInf, 1, false);
  const std::string text = export_lp(m);
  EXPECT_NE(text.find("v_e1 free"), std::string::npos);
  EXPECT_NE(text.find("a_b = 2"), std::string::npos);
  EXPECT_NE(text.find("a_b_2"), std::string::npos);
}
