#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "perishfair/error.hpp"
#include "perishfair/guardrail.hpp"
#include "perishfair/harness.hpp"

using namespace perishfair;

namespace {

ProblemInstance unit_demand(std::size_t T, std::size_t B, const PerishingSpec& perishing, double delta) {
  ProblemInstance inst;
  inst.name = "unit_demand";
  inst.horizon = T;
  inst.budget = B;
  inst.types = {{"all", 1.0}};
  inst.demand = DemandSpec::deterministic(std::vector<std::vector<double>>(T, {1.0}));
  inst.perishing = perishing;
  inst.delta = delta;
  return inst;
}

struct Running {
  ProblemInstance inst = make_named_instance({"running_example"});
  Schedule sched = build_schedule(inst.schedule, inst.perishing, 0);
};

// Small random instances for the monotonicity property.
ProblemInstance random_instance(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> horizon(5, 40);
  const std::size_t T = static_cast<std::size_t>(horizon(gen));
  const std::size_t B = T + static_cast<std::size_t>(horizon(gen));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<PerishLaw> laws;
  for (std::size_t b = 0; b < B; ++b) {
    switch (b % 3) {
      case 0: laws.emplace_back(GeometricPerish{0.01 + 0.2 * unif(gen)}); break;
      case 1: laws.push_back(PerishLaw::rounded_uniform(1.0, 1.0 + static_cast<double>(T) * 1.5 * unif(gen))); break;
      default: laws.emplace_back(DeterministicPerish{1 + static_cast<long>(unif(gen) * static_cast<double>(T))});
    }
  }
  ProblemInstance inst;
  inst.name = "random";
  inst.horizon = T;
  inst.budget = B;
  inst.types = {{"a", 1.0}, {"b", 2.0}};
  inst.demand = DemandSpec::truncated_normal(T, 2, 1.0, 0.4, 1.0, 1.8);
  inst.perishing = PerishingSpec(std::move(laws));
  inst.delta = 0.05;
  return inst;
}

}  // namespace

TEST(Tau, RunningExampleLatestAllocationTimes) {
  Running r;
  EXPECT_EQ(tau_b(r.inst, r.sched, 0, 1, 0.75), std::optional<std::size_t>(2));  // a
  EXPECT_EQ(tau_b(r.inst, r.sched, 1, 1, 0.75), std::optional<std::size_t>(3));  // b
  EXPECT_EQ(tau_b(r.inst, r.sched, 2, 1, 0.75), std::optional<std::size_t>(2));  // c
}

TEST(Tau, ZeroAllocationNeverConsumes) {
  Running r;
  for (std::size_t b = 0; b < 3; ++b) EXPECT_FALSE(tau_b(r.inst, r.sched, b, 1, 0.0).has_value());
}

// With one arrival per round the slow process reduces to ceil(rank / x).
TEST(Tau, AdversarialInstanceMatchesSimplifiedForm) {
  for (std::size_t T : {10u, 100u}) {
    const auto inst = make_named_instance({"flipped_order", T});
    const auto sched = build_schedule(inst.schedule, inst.perishing, 0);
    for (double x : {1.0 / static_cast<double>(T), 0.5 / static_cast<double>(T), 0.37}) {
      for (std::size_t b = 0; b < T; ++b) {
        const double rank = static_cast<double>(T - b);
        const double simple = std::ceil(rank / x - 1e-9);
        const auto tau = tau_b(inst, sched, b, 1, x);
        if (simple <= static_cast<double>(T)) {
          ASSERT_TRUE(tau.has_value());
          EXPECT_EQ(static_cast<double>(*tau), simple);
        } else {
          EXPECT_FALSE(tau.has_value());
        }
      }
    }
    // x <= 1/T: every unit but the first-ranked one is never consumed in time.
    const double x = 1.0 / static_cast<double>(T);
    for (std::size_t b = 0; b + 1 < T; ++b) EXPECT_FALSE(tau_b(inst, sched, b, 1, x).has_value());
  }
}

TEST(Tau, LaterStartUsesRemainingArrivals) {
  Running r;
  // From t = 2 the slow process has consumed 0.75 and adds 0.75 per arrival.
  EXPECT_EQ(tau_b(r.inst, r.sched, 1, 2, 0.75), std::optional<std::size_t>(3));
  EXPECT_EQ(tau_b(r.inst, r.sched, 2, 2, 0.75), std::optional<std::size_t>(2));
}

TEST(Mu, RunningExample) {
  Running r;
  EXPECT_NEAR(mu_of_x(r.inst, r.sched, 0.75), 1.5, 1e-12);
  EXPECT_NEAR(delta_bar(r.inst, r.sched, 0.75, ConfMode::kZero), 1.5, 1e-12);
  EXPECT_GT(delta_bar(r.inst, r.sched, 0.75, ConfMode::kFull), 1.5);
}

TEST(Mu, AfterHorizonIsZero) {
  const auto inst = unit_demand(8, 8, PerishingSpec::iid(PerishLaw::after_horizon(8), 8), 0.1);
  const auto sched = Schedule::identity(8);
  for (double x : {0.0, 0.3, 1.0}) EXPECT_EQ(mu_of_x(inst, sched, x), 0.0);
  EXPECT_EQ(delta_bar(inst, sched, 0.5, ConfMode::kZero), 0.0);
}

TEST(Mu, GeometricClosedForm) {
  const std::size_t T = 20, B = 15;
  const double p = 0.07;
  const auto inst = unit_demand(T, B, PerishingSpec::iid(PerishLaw(GeometricPerish{p}), B), 0.1);
  const auto sched = Schedule::identity(B);
  for (double x : {0.2, 0.5, 0.75, 1.0, 1.3}) {
    double oracle = 0.0;
    for (std::size_t r = 1; r <= B; ++r) {
      const double tau = std::ceil(static_cast<double>(r) / x - 1e-9);
      const double cap = std::min(static_cast<double>(T), tau);
      oracle += 1.0 - std::pow(1.0 - p, cap - 1.0);
    }
    EXPECT_NEAR(mu_of_x(inst, sched, x), oracle, 1e-12) << x;
  }
}

TEST(Mu, MonteCarloAgreesWithAnalytic) {
  NamedInstanceParams np{"front_loaded", 30, 60};
  np.schedule = ScheduleKind::kMean;
  const auto inst = make_named_instance(np);
  const auto sched = build_schedule(inst.schedule, inst.perishing, 4);
  for (double x : {0.4, 0.8}) {
    const double exact = mu_of_x(inst, sched, x);
    const auto mc = mu_of_x_estimate(inst, sched, x, MuMethod::monte_carlo(20000, 8));
    EXPECT_GT(mc.std_error, 0.0);
    EXPECT_NEAR(mc.value, exact, 3 * mc.std_error) << x;
  }
}

TEST(Mu, MonteCarloNeedsReps) {
  Running r;
  try {
    mu_of_x(r.inst, r.sched, 0.5, MuMethod::monte_carlo(0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }
}

TEST(DeltaBar, ClampsAtBudget) {
  const auto inst = make_named_instance({"flipped_order", 10});
  const auto sched = build_schedule(inst.schedule, inst.perishing, 0);
  EXPECT_NEAR(mu_of_x(inst, sched, 0.05), 9.0, 1e-12);
  EXPECT_EQ(delta_bar(inst, sched, 0.05, ConfMode::kFull), 10.0);
}

TEST(XLower, RunningExampleZeroConf) {
  Running r;
  PlanOptions opt;
  opt.conf_mode = ConfMode::kZero;
  const auto plan = compute_x_lower(r.inst, r.sched, opt);
  EXPECT_NEAR(plan.n_bar, 4.0, 1e-12);
  EXPECT_NEAR(plan.epsilon, 0.75e-3, 1e-15);
  EXPECT_NEAR(plan.x_lower, 0.375, 1e-3);
  EXPECT_NEAR(plan.l_perish, 0.75 - plan.x_lower, 1e-12);
  EXPECT_NEAR(plan.delta_bar_at_x_lower, 1.5, 1e-12);
  EXPECT_NEAR(plan.p_bar[0], 1.5, 1e-12);
}

TEST(XLower, AdversarialInstance) {
  for (std::size_t T : {10u, 100u}) {
    const auto inst = make_named_instance({"flipped_order", T});
    const auto sched = build_schedule(inst.schedule, inst.perishing, 0);
    PlanOptions opt;
    opt.conf_mode = ConfMode::kZero;
    const auto plan = compute_x_lower(inst, sched, opt);
    const double Td = static_cast<double>(T);
    EXPECT_NEAR(plan.x_lower, 1.0 / Td, plan.epsilon);
    EXPECT_NEAR(plan.l_perish, 1.0 - 1.0 / Td, plan.epsilon);
  }
}

TEST(XLower, NoPerishingGivesBaseline) {
  const auto inst = unit_demand(12, 20, PerishingSpec::iid(PerishLaw::after_horizon(12), 20), 0.1);
  const auto sched = Schedule::identity(20);
  PlanOptions opt;
  opt.conf_mode = ConfMode::kZero;
  const auto plan = compute_x_lower(inst, sched, opt);
  EXPECT_EQ(plan.x_lower, 20.0 / 12.0);
  EXPECT_EQ(plan.l_perish, 0.0);
  for (double p : plan.p_bar) EXPECT_EQ(p, 0.0);
  for (double e : plan.eta) EXPECT_EQ(e, 0.0);
}

TEST(XLower, SatisfiesItsOwnInequality) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = random_instance(seed);
    const auto sched = Schedule::identity(inst.budget);
    for (auto mode : {ConfMode::kFull, ConfMode::kZero}) {
      PlanOptions opt;
      opt.conf_mode = mode;
      const auto plan = compute_x_lower(inst, sched, opt);
      const double B = static_cast<double>(inst.budget);
      EXPECT_LE(plan.x_lower, (B - delta_bar(inst, sched, plan.x_lower, mode)) / plan.n_bar + 1e-12);
      if (plan.x_lower < plan.baseline) {
        const double up = plan.x_lower + plan.epsilon;
        EXPECT_GT(up, (B - delta_bar(inst, sched, up, mode)) / plan.n_bar);
      }
      EXPECT_GE(plan.x_lower, 0.0);
      EXPECT_LE(plan.x_lower, B / plan.n_bar);
      EXPECT_NEAR(plan.l_perish, B / plan.n_bar - plan.x_lower, 1e-12);
    }
  }
}

TEST(XLower, EnvyBudgetOnlyMovesUpper) {
  Running r;
  const auto plan = compute_x_lower(r.inst, r.sched);
  const auto moved = plan.with_envy_budget(0.2);
  EXPECT_EQ(moved.x_lower, plan.x_lower);
  EXPECT_EQ(moved.x_upper - moved.x_lower, 0.2);
  EXPECT_EQ(moved.p_bar, plan.p_bar);
}

// mu nonincreasing and the right-hand side nondecreasing on a 100-point grid.
TEST(Monotonicity, MuAndRhsOnGrid) {
  for (std::uint64_t seed = 11; seed <= 15; ++seed) {
    const auto inst = random_instance(seed);
    const auto sched = Schedule::identity(inst.budget);
    const auto grid = x_grid(inst, sched, 100);
    ASSERT_EQ(grid.size(), 100u);
    double prev_mu = 1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double mu = mu_of_x(inst, sched, grid[i].x);
      EXPECT_LE(mu, prev_mu + 1e-12);
      prev_mu = mu;
      if (i > 0) EXPECT_GE(grid[i].rhs, grid[i - 1].rhs - 1e-12);
    }
  }
}

// Exhaustive summation oracle (independent script) for B = T = 5, one
// arrival per round, Geometric(0.3), identity order, X-lower fixed at 0.7.
TEST(Eta, BruteForceSmallGeometric) {
  const auto inst = unit_demand(5, 5, PerishingSpec::iid(PerishLaw(GeometricPerish{0.3}), 5), 0.1);
  const auto sched = Schedule::identity(5);
  GuardrailPlan plan;
  plan.x_lower = 0.7;
  const double oracle[] = {3.0897, 1.5897, 0.7497, 0.3087, 0.0};
  for (std::size_t t = 1; t <= 5; ++t) EXPECT_NEAR(eta_t(inst, sched, plan, t), oracle[t - 1], 1e-12) << t;
}

TEST(Eta, FirstRoundEqualsMu) {
  for (std::uint64_t seed = 21; seed <= 23; ++seed) {
    const auto inst = random_instance(seed);
    const auto sched = Schedule::identity(inst.budget);
    const auto plan = compute_x_lower(inst, sched);
    EXPECT_NEAR(plan.eta[0], mu_of_x(inst, sched, plan.x_lower), 1e-12);
    for (double e : plan.eta) EXPECT_GE(e, 0.0);
  }
}

TEST(PBar, NonincreasingAndAnchored) {
  for (std::uint64_t seed = 31; seed <= 35; ++seed) {
    const auto inst = random_instance(seed);
    const auto sched = Schedule::identity(inst.budget);
    for (auto mode : {ConfMode::kFull, ConfMode::kZero}) {
      PlanOptions opt;
      opt.conf_mode = mode;
      const auto plan = compute_x_lower(inst, sched, opt);
      ASSERT_EQ(plan.p_bar.size(), inst.horizon);
      EXPECT_NEAR(plan.p_bar[0], plan.delta_bar_at_x_lower, 1e-9);
      for (std::size_t t = 1; t < plan.p_bar.size(); ++t) EXPECT_LE(plan.p_bar[t], plan.p_bar[t - 1]);
      EXPECT_EQ(p_bar_sequence(inst, sched, plan), plan.p_bar);
    }
  }
}

TEST(PBar, NoPerishingFullModeIsConfidenceOnly) {
  const auto inst = unit_demand(12, 20, PerishingSpec::iid(PerishLaw::after_horizon(12), 20), 0.1);
  const auto sched = Schedule::identity(20);
  const auto plan = compute_x_lower(inst, sched);
  EXPECT_NEAR(plan.p_bar[0], conf_p(1, 0.0, 12, 0.1), 1e-12);
  EXPECT_NEAR(plan.p_bar[0], plan.delta_bar_at_x_lower, 1e-12);
}

TEST(AnalyticBounds, NotApplicableOffUnitDemand) {
  const auto inst = make_named_instance({"running_example"});
  const auto rep = analytic_bounds(inst, Schedule({2, 3, 1}));
  EXPECT_FALSE(rep.applicable);
  EXPECT_FALSE(rep.reason.empty());
}

TEST(AnalyticBounds, GeometricReferenceValue) {
  const std::size_t T = 100;
  const double p = std::pow(100.0, -1.5);
  const auto inst = unit_demand(T, T, PerishingSpec::iid(PerishLaw(GeometricPerish{p}), T), 0.01);
  const auto rep = analytic_bounds(inst, Schedule::identity(T));
  ASSERT_TRUE(rep.applicable);
  ASSERT_TRUE(rep.geometric_x_lower_bound.has_value());
  EXPECT_NEAR(*rep.geometric_x_lower_bound, 0.62769037899535897831, 1e-12);
  EXPECT_FALSE(rep.geometric_vacuous);
  EXPECT_NEAR(*rep.geometric_delta, 2 * std::log(100.0) * 0.1 / 0.81, 1e-12);
}

TEST(AnalyticBounds, GeometricVacuousWhenTpAtLeastOne) {
  const std::size_t T = 20;
  const auto inst = unit_demand(T, T, PerishingSpec::iid(PerishLaw(GeometricPerish{0.06}), T), 0.05);
  const auto rep = analytic_bounds(inst, Schedule::identity(T));
  EXPECT_TRUE(rep.geometric_vacuous);
  EXPECT_GT(*rep.geometric_l_perish_bound, 1.0);
  EXPECT_FALSE(rep.geometric_delta.has_value());
}

TEST(AnalyticBounds, RoomToBreatheThreshold) {
  const std::size_t T = 100;
  const auto inst = unit_demand(T, T, PerishingSpec::iid(PerishLaw::after_horizon(T), T), 0.01);
  const auto rep = analytic_bounds(inst, Schedule::identity(T), 0.5);
  EXPECT_TRUE(rep.alpha_condition_mean);
  EXPECT_TRUE(rep.alpha_condition_variance);
  EXPECT_NEAR(*rep.alpha_delta, 3.95821004592936594, 1e-12);
  EXPECT_NEAR(*rep.alpha_x_lower_bound, 0.9, 1e-12);
  EXPECT_TRUE(rep.sufficient_delta.has_value());
  EXPECT_EQ(*rep.sufficient_delta, 0.0);
}

TEST(AnalyticBounds, NecessaryConditionDeterministic) {
  // Every unit perishes at the end of round 1: E[P_{<2}] = T > 1 with no
  // randomness, so offset-expiry is impossible for every delta.
  const std::size_t T = 10;
  const auto inst = unit_demand(T, T, PerishingSpec::iid(PerishLaw(DeterministicPerish{1}), T), 0.05);
  const auto rep = analytic_bounds(inst, Schedule::identity(T));
  EXPECT_TRUE(rep.necessary_condition_violated);
  EXPECT_EQ(*rep.infeasible_below_delta, 1.0);
  EXPECT_FALSE(rep.sufficient_delta.has_value());
}
