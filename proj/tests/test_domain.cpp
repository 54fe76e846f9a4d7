#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "shiftplan/domain.hpp"

using namespace shiftplan;

namespace {

Scenario tiny(int T, int delta, Boundary b = Boundary::ZeroPadded) {
  Scenario sc;
  sc.horizon = T;
  sc.shift_length = delta;
  sc.min_break = 0;
  sc.boundary = b;
  return sc;
}

}  // namespace

TEST(Demand, EnvelopeVanishesAtHorizonEnd) {
  Scenario sc;
  EXPECT_NEAR(demand_at(sc, sc.horizon), 0.0, 1e-12);
}

TEST(Demand, EnvelopeMidDayValue) {
  Scenario sc;  // d_max = 10, T = 168
  const double expected = 5.0 * (1.0 - std::cos(3.5 * std::numbers::pi)) * std::sin(std::numbers::pi / 4.0);
  EXPECT_NEAR(expected, 3.5355339, 1e-7);
  EXPECT_NEAR(demand_at(sc, 42), expected, 1e-12);
}

TEST(Demand, OffsetSinusoidPeak) {
  Scenario sc;
  sc.demand_model = DemandModel::OffsetSinusoid;
  EXPECT_NEAR(demand_at(sc, 6), 20.0, 1e-12);
}

TEST(Demand, MatchesIndependentFormulaEverywhere) {
  for (auto model : {DemandModel::EnvelopeSinusoid, DemandModel::OffsetSinusoid}) {
    Scenario sc;
    sc.demand_model = model;
    for (int t = 1; t <= sc.horizon; ++t) {
      EXPECT_NEAR(demand_at(sc, t), oracle::demand(sc, t), 1e-12);
      EXPECT_GE(demand_at(sc, t), 0.0);
    }
  }
}

TEST(Demand, ExplicitAndOutOfRange) {
  Scenario sc = tiny(3, 1);
  sc.demand_model = DemandModel::Explicit;
  sc.demand = {1.0, 0.0, 2.5};
  EXPECT_DOUBLE_EQ(demand_at(sc, 3), 2.5);
  EXPECT_THROW(demand_at(sc, 0), std::out_of_range);
  EXPECT_THROW(demand_at(sc, 4), std::out_of_range);
  EXPECT_EQ(demand_curve(sc), (std::vector<double>{1.0, 0.0, 2.5}));
}

TEST(Reward, Examples) {
  EXPECT_EQ(reward(0.0, {10.0, 2.0}), 0.0);
  EXPECT_EQ(reward(5.0, {0.0, 2.0}), 0.0);
  EXPECT_NEAR(reward(1.0, {1.0, 1.0}), 0.632121, 1e-6);
  EXPECT_THROW(reward(-1.0, {1.0, 1.0}), std::invalid_argument);
}

TEST(Reward, MonotoneConcaveBoundedAndIncreasingInDemand) {
  for (double a : {0.5, 1.0, 2.0, 5.0})
    for (double d : {0.1, 1.0, 3.0, 10.0}) {
      for (int y = 0; y < 40; ++y) {
        const double f0 = reward(y, {d, a}), f1 = reward(y + 1, {d, a}), f2 = reward(y + 2, {d, a});
        EXPECT_GE(f1, f0);
        EXPECT_LE(f2 - 2 * f1 + f0, 1e-12);
        EXPECT_LE(f0, d);
        EXPECT_NEAR(f0, oracle::reward(y, d, a), 1e-12 * (1 + d));
      }
      for (double y = 0.0; y < 10.0; y += 0.37) {
        EXPECT_GE(reward(y + 0.01, {d, a}), reward(y, {d, a}));
        EXPECT_GE(reward(y, {d * 1.1, a}), reward(y, {d, a}) - 1e-15);
      }
    }
}

TEST(Supply, Examples) {
  EXPECT_EQ(supply_curve({{1, 0, 0, 0}}, tiny(4, 2)).active, (std::vector<int>{1, 1, 0, 0}));
  EXPECT_EQ(supply_curve({{1, 0, 0, 0}}, tiny(4, 2, Boundary::Circular)).active, (std::vector<int>{1, 1, 0, 0}));
  EXPECT_EQ(supply_curve({{0, 0, 0, 1}}, tiny(4, 2, Boundary::Circular)).active, (std::vector<int>{1, 0, 0, 1}));
  EXPECT_THROW(supply_curve({{1, 0}}, tiny(4, 2)), std::invalid_argument);
}

TEST(Supply, RandomPlansSatisfyCurveIdentities) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int T = std::uniform_int_distribution<int>(1, 30)(rng);
    Scenario sc = tiny(T, std::uniform_int_distribution<int>(1, T)(rng));
    sc.min_break = std::uniform_int_distribution<int>(0, 40)(rng);
    ShiftPlan plan{std::vector<int>(static_cast<std::size_t>(T))};
    for (int& v : plan.starts) v = std::uniform_int_distribution<int>(0, 4)(rng);
    for (auto b : {Boundary::ZeroPadded, Boundary::Circular}) {
      sc.boundary = b;
      const auto sup = supply_curve(plan, sc);
      long sum_y = 0;
      for (int t = 0; t < T; ++t) {
        const auto k = static_cast<std::size_t>(t);
        EXPECT_EQ(sup.active[k], oracle::window_sum(plan.starts, t + 1, sc.shift_length, b == Boundary::Circular));
        EXPECT_EQ(sup.extended[k],
                  oracle::window_sum(plan.starts, t + 1, sc.shift_length + sc.min_break, b == Boundary::Circular));
        EXPECT_GE(sup.active[k], 0);
        EXPECT_GE(sup.extended[k], sup.active[k]);
        EXPECT_GE(sup.extended[k], plan.starts[k]);
        sum_y += sup.active[k];
      }
      if (b == Boundary::Circular) EXPECT_EQ(sum_y, sc.shift_length * plan.total());
      else EXPECT_LE(sum_y, sc.shift_length * plan.total());
    }
  }
}

TEST(TotalReward, Examples) {
  Scenario sc = tiny(2, 1);
  sc.demand_model = DemandModel::Explicit;
  sc.demand = {1.0, 1.0};
  sc.steepness = 1.0;
  EXPECT_NEAR(total_reward(ShiftPlan{{1, 1}}, sc), 1.264241, 1e-6);
  EXPECT_EQ(total_reward(ShiftPlan{{0, 0}}, sc), 0.0);

  Scenario sc3 = tiny(3, 2);
  sc3.demand_model = DemandModel::Explicit;
  sc3.demand = {1.0, 1.0, 1.0};
  sc3.steepness = 2.0;
  EXPECT_NEAR(total_reward(ShiftPlan{{1, 0, 0}}, sc3), 1.729329, 1e-6);
}

TEST(Scenario, ValidationRejectsBadParameters) {
  auto bad = [](auto mutate) {
    Scenario sc;
    mutate(sc);
    EXPECT_THROW(sc.validate(), std::invalid_argument);
  };
  bad([](Scenario& s) { s.horizon = 0; });
  bad([](Scenario& s) { s.drivers = -1; });
  bad([](Scenario& s) { s.shifts_per_driver = 0; });
  bad([](Scenario& s) { s.shift_length = 0; });
  bad([](Scenario& s) { s.shift_length = s.horizon + 1; });
  bad([](Scenario& s) { s.min_break = -1; });
  bad([](Scenario& s) { s.peak_demand = -1; });
  bad([](Scenario& s) { s.steepness = 0; });
  bad([](Scenario& s) { s.vehicle_cap = -1; });
  bad([](Scenario& s) {
    s.demand_model = DemandModel::Explicit;
    s.demand = {1.0};
  });
  EXPECT_NO_THROW(Scenario{}.validate());
}
