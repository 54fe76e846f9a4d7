#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shiftplan/benchmark.hpp"

using namespace shiftplan;

namespace {

Scenario explicit_demand(std::vector<double> d, int N, int s, int delta, double a) {
  Scenario sc;
  sc.horizon = static_cast<int>(d.size());
  sc.demand_model = DemandModel::Explicit;
  sc.demand = std::move(d);
  sc.drivers = N;
  sc.vehicle_cap = N;
  sc.shifts_per_driver = s;
  sc.shift_length = delta;
  sc.min_break = 0;
  sc.steepness = a;
  return sc;
}

/// Maximizer of a unimodal function on [lo, hi] by golden-section search.
template <class F>
double golden_max(F f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  for (int i = 0; i < 200; ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) > f(d)) b = d;
    else a = c;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST(AgnosticOptimum, UniformDemandSpreadsEvenly) {
  const Scenario sc = explicit_demand(std::vector<double>(6, 2.0), 3, 2, 1, 1.5);
  const auto opt = agnostic_optimum_closed_form(sc);
  for (double y : opt.supply) EXPECT_NEAR(y, sc.working_time() / 6.0, 1e-12);
}

TEST(AgnosticOptimum, ProportionalToDemand) {
  const Scenario sc = explicit_demand({1.0, 3.0}, 2, 2, 1, 1.0);  // s N delta = 4
  const auto opt = agnostic_optimum_closed_form(sc);
  EXPECT_NEAR(opt.supply[0], 1.0, 1e-12);
  EXPECT_NEAR(opt.supply[1], 3.0, 1e-12);
}

TEST(AgnosticOptimum, CommonMarginalRewardOnDefaultScenario) {
  const Scenario sc;
  const auto opt = agnostic_optimum_closed_form(sc);
  const auto d = demand_curve(sc);
  for (std::size_t t = 0; t < d.size(); ++t) {
    if (d[t] == 0.0) continue;
    EXPECT_NEAR(sc.steepness * std::exp(-sc.steepness * opt.supply[t] / d[t]), opt.multiplier, 1e-12);
  }
  double sum = 0.0;
  for (double y : opt.supply) sum += y;
  EXPECT_NEAR(sum, sc.working_time(), 1e-8 * sc.working_time());
}

TEST(AgnosticOptimum, ZeroDemandSteps) {
  const Scenario sc = explicit_demand({0.0, 2.0, 0.0, 2.0}, 1, 2, 2, 1.0);
  const auto opt = agnostic_optimum_closed_form(sc);
  EXPECT_EQ(opt.supply[0], 0.0);
  EXPECT_EQ(opt.supply[2], 0.0);
  EXPECT_LE(kkt_residuals(sc, opt).worst(), 1e-8);
  EXPECT_THROW(agnostic_optimum_closed_form(explicit_demand({0.0, 0.0}, 1, 1, 1, 1.0)), UndefinedGapError);
}

TEST(WaterFill, ZeroBudget) {
  const auto opt = water_fill(explicit_demand({1.0, 2.0}, 1, 1, 1, 2.0), 0.0);
  EXPECT_EQ(opt.supply, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(opt.multiplier, 2.0);
}

TEST(WaterFill, SymmetricTwoSteps) {
  const double a = 1.7;
  const auto opt = water_fill(explicit_demand({1.0, 1.0}, 1, 1, 1, a), 2.0);
  EXPECT_NEAR(opt.supply[0], 1.0, 1e-8);
  EXPECT_NEAR(opt.supply[1], 1.0, 1e-8);
  EXPECT_NEAR(opt.multiplier, a * std::exp(-a), 1e-8);
}

TEST(WaterFill, MatchesClosedFormOnDefaultScenario) {
  const Scenario sc;
  const auto a = agnostic_optimum_closed_form(sc), b = water_fill(sc);
  for (std::size_t t = 0; t < a.supply.size(); ++t) EXPECT_NEAR(a.supply[t], b.supply[t], 1e-6);
  EXPECT_NEAR(a.reward, b.reward, 1e-6);
  EXPECT_LE(kkt_residuals(sc, b).worst(), 1e-8);
}

TEST(WaterFill, UniqueFromDifferentBrackets) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> d(24);
    for (double& v : d) v = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
    const Scenario sc = explicit_demand(d, 4, 3, 5, std::uniform_real_distribution<double>(0.2, 4.0)(rng));
    const auto base = water_fill(sc);
    for (auto [lo, hi] : {std::pair{1e-12, 1e-6}, std::pair{0.5, 0.9}, std::pair{1e-3, 1e-3}}) {
      WaterFillOptions o;
      o.lambda_low = lo * sc.steepness;
      o.lambda_high = hi * sc.steepness;
      const auto other = water_fill(sc, std::nullopt, o);
      for (std::size_t t = 0; t < d.size(); ++t) EXPECT_NEAR(base.supply[t], other.supply[t], 1e-8);
    }
  }
}

TEST(WaterFill, GenericSolverHandlesOtherConcaveRewards) {
  // f_t(y) = w_t log(1 + y): marginal w_t / (1 + y), inverse y = w_t / lambda - 1.
  const std::vector<double> w{1.0, 2.0, 4.0, 0.5};
  auto [y, lambda] = water_fill_generic(
      4, 5.0, [&](int t, double l) { return std::max(0.0, w[static_cast<std::size_t>(t)] / l - 1.0); }, 4.0);
  double sum = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    sum += y[t];
    if (y[t] > 0.0) EXPECT_NEAR(w[t] / (1.0 + y[t]), lambda, 1e-8);
    else EXPECT_LE(w[t], lambda + 1e-8);
  }
  EXPECT_NEAR(sum, 5.0, 1e-9);
}

TEST(RelativeGap, ZeroPlanIsOneAndExactSupplyIsZero) {
  // Two steps of equal demand with delta = 1: the optimum puts s N / 2
  // on each step, which a plan can realize exactly.
  const Scenario sc = explicit_demand({3.0, 3.0}, 2, 1, 1, 1.0);
  EXPECT_NEAR(relative_gap({{1, 1}}, sc).delta, 0.0, 1e-12);
  Scenario empty = sc;
  const auto g = relative_gap({{0, 0}}, empty);
  EXPECT_NEAR(g.delta, 1.0, 1e-12);
  EXPECT_GT(g.r_star, 0.0);
}

TEST(RelativeGap, UndefinedWithoutDrivers) {
  Scenario sc;
  sc.drivers = 0;
  EXPECT_THROW(relative_gap({std::vector<int>(168, 0)}, sc), UndefinedGapError);
}

TEST(RelativeGap, WithinUnitIntervalAndBelowOptimumForRandomPlans) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    Scenario sc;
    sc.horizon = 24;
    sc.drivers = std::uniform_int_distribution<int>(1, 3)(rng);
    sc.vehicle_cap = sc.drivers;
    sc.shifts_per_driver = std::uniform_int_distribution<int>(1, 3)(rng);
    sc.shift_length = std::uniform_int_distribution<int>(1, 4)(rng);
    sc.min_break = std::uniform_int_distribution<int>(0, 2)(rng);
    sc.peak_demand = 5.0;
    const auto plan = oracle::random_feasible_plan(sc, rng);
    if (!plan) continue;
    const auto g = relative_gap({*plan}, sc);
    EXPECT_GE(g.delta, -1e-12);
    EXPECT_LE(g.delta, 1.0 + 1e-12);
    EXPECT_GE(g.r_star + 1e-9, oracle::plan_reward(*plan, sc));
  }
}

TEST(ServiceStandard, Examples) {
  const double a = 1.3;
  const auto y = service_standard_supply(explicit_demand({1.0}, 1, 1, 1, a), 1.0 - std::exp(-a));
  EXPECT_NEAR(y[0], 1.0, 1e-12);
  const auto small = service_standard_supply(explicit_demand({4.0}, 1, 1, 1, a), 1e-12);
  EXPECT_NEAR(small[0], 0.0, 1e-9);
  const auto y2 = service_standard_supply(explicit_demand({2.0}, 1, 1, 1, 2.0), 0.8);
  EXPECT_NEAR(y2[0], std::log(5.0), 1e-12);
  EXPECT_NEAR(oracle::reward(y2[0], 2.0, 2.0), 1.6, 1e-9);
  EXPECT_THROW(service_standard_supply(explicit_demand({1.0}, 1, 1, 1, a), 1.0), std::invalid_argument);
  EXPECT_THROW(service_standard_supply(explicit_demand({1.0}, 1, 1, 1, a), 0.0), std::invalid_argument);
}

TEST(EconomicStandard, Examples) {
  const Scenario sc = explicit_demand({1.0, 3.0}, 1, 1, 1, 2.0);
  for (double c : {2.0, 2.5}) {
    const auto y = economic_standard_supply(sc, c);
    EXPECT_EQ(y, (std::vector<double>{0.0, 0.0}));
  }
  const double a = 2.0;
  EXPECT_NEAR(economic_standard_supply(explicit_demand({1.0}, 1, 1, 1, a), a * std::exp(-a))[0], 1.0, 1e-12);
  const auto y = economic_standard_supply(explicit_demand({2.0}, 1, 1, 1, 2.0), 1.0);
  EXPECT_NEAR(y[0], std::log(2.0), 1e-12);
  const double argmax = golden_max([](double v) { return oracle::reward(v, 2.0, 2.0) - v; }, 0.0, 10.0);
  EXPECT_NEAR(y[0], argmax, 1e-6);
  EXPECT_THROW(economic_standard_supply(sc, 0.0), std::invalid_argument);
}
