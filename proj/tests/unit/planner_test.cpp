#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fabflow/error.hpp"
#include "fabflow/fixtures.hpp"
#include "fabflow/robust_planner.hpp"
#include "fabflow/simplex.hpp"
#include "models.hpp"
#include "oracles.hpp"

namespace fabflow::planner {
namespace {

struct Fixture {
  scenario::Scenario s;
  RoutingModel model;
  explicit Fixture(std::string_view name) : s(scenario::load_fixture(name)), model(s.queueing->model()) {}
  const WltpVector& nominal() const { return s.queueing->nominal_p; }
};

std::vector<double> neighborhood_lo(const Fixture& f) {
  return simplex::Domain::neighborhood(f.nominal().values(), *f.s.limits.neighborhood_radius, f.s.limits.eta).lo;
}
std::vector<double> neighborhood_hi(const Fixture& f) {
  return simplex::Domain::neighborhood(f.nominal().values(), *f.s.limits.neighborhood_radius, f.s.limits.eta).hi;
}

TEST(WorstCase, VStarIsProjectedGradientNorm) {
  const Fixture f("queueing_reference");
  const FleetConfig c{{4}};
  const auto wc = worst_case_direction(f.model, c, f.s.limits, f.nominal());
  const auto t = simplex::tangent_from_free(queueing::wip_gradient(f.model, wc.p_star, c));
  EXPECT_NEAR(wc.v_star, simplex::norm2(t), 1e-8);
  EXPECT_NEAR(simplex::norm2(wc.x_star), 1.0, 1e-12);
  double sum = 0.0;
  for (double v : wc.x_star) sum += v;
  EXPECT_NEAR(sum, 0.0, 1e-12);
}

TEST(WorstCase, ConstantModelHasZeroVStar) {
  PlannerLimits limits;
  const auto wc = worst_case_direction(models::constant_model(), FleetConfig{}, limits, WltpVector({0.2, 0.3, 0.5}));
  EXPECT_EQ(wc.v_star, 0.0);
  ASSERT_EQ(wc.p_star.size(), 3u);
}

TEST(WorstCase, MatchesGridOracleAcrossFleetSizes) {
  const Fixture f("queueing_reference");
  double last = std::numeric_limits<double>::infinity();
  for (int c = 3; c <= 8; ++c) {
    const FleetConfig fleet{{c}};
    const auto wc = worst_case_direction(f.model, fleet, f.s.limits, f.nominal());
    const auto grid = oracle::grid_worst_case(f.model, fleet, neighborhood_lo(f), neighborhood_hi(f));
    EXPECT_NEAR(wc.v_star, grid.v, 1e-4) << "c = " << c;
    EXPECT_LE(wc.v_star, last) << "c = " << c;
    last = wc.v_star;
  }
}

TEST(WorstCase, NoStablePoint) {
  PlannerLimits limits;
  try {
    (void)worst_case_direction(models::single_station(3.0, 2.0), FleetConfig{}, limits, WltpVector({0.5, 0.5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_stable_point);
  }
}

TEST(DeltaWip, ZeroEpsilon) {
  const Fixture f("queueing_reference");
  EXPECT_EQ(delta_wip(f.model, f.nominal(), FleetConfig{{4}}, 0.0), 0.0);
}

TEST(DeltaWip, LinearRegimeMatchesGradientNorm) {
  const Fixture f("queueing_reference");
  const FleetConfig c{{4}};
  constexpr double kEps = 1e-5;
  const auto t = simplex::tangent_from_free(queueing::wip_gradient(f.model, f.nominal(), c));
  const double expected = kEps * simplex::norm2(t);
  EXPECT_NEAR(delta_wip(f.model, f.nominal(), c, kEps), expected, 0.05 * expected);
}

TEST(DeltaWip, MonteCarloRatio) {
  const Fixture f("queueing_reference");
  const FleetConfig c{{4}};
  const double eps = 0.01;
  const double value = delta_wip(f.model, f.nominal(), c, eps, f.s.limits.eta);
  const double base = queueing::total_wip(f.model, f.nominal(), c);
  const auto domain = simplex::Domain::clipped(3, f.s.limits.eta);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  double mc = 0.0;
  for (int k = 0; k < 10000; ++k) {
    std::vector<double> x(3);
    for (auto& v : x) v = normal(rng);
    const double mean = (x[0] + x[1] + x[2]) / 3.0;
    for (auto& v : x) v -= mean;
    const double len = simplex::norm2(x);
    std::vector<double> q(3);
    for (int i = 0; i < 3; ++i) q[i] = f.nominal()[i] + eps * x[i] / len;
    const double w = queueing::total_wip(f.model, WltpVector(simplex::project(q, domain)), c);
    mc = std::max(mc, std::abs(w - base));
  }
  EXPECT_GE(value / mc, 0.95);
}

TEST(Constraints, ReferenceNominalPassesEverything) {
  const Fixture f("queueing_reference");
  const auto record = check_constraints(f.model, f.nominal(), f.s.fleet->nominal_config(), f.s.limits);
  EXPECT_TRUE(record.all_pass());
  EXPECT_EQ(record.checks.size(), 6u);
}

TEST(Constraints, OversizedFleetFailsOnlyFleetSize) {
  const Fixture f("queueing_reference");
  const FleetConfig c{{f.s.limits.c_max + 1}};
  const auto record = check_constraints(f.model, f.nominal(), c, f.s.limits);
  ASSERT_EQ(record.checks.size(), 6u);
  EXPECT_FALSE(record.find(kFleetSize)->pass);
  EXPECT_EQ(record.find(kFleetSize)->measured, f.s.limits.c_max + 1);
  for (auto name : {kNominalWip, kWltpSum, kWltpBounds, kDeltaWip, kWipCap}) {
    EXPECT_TRUE(record.find(name)->pass) << name;
  }
}

TEST(Constraints, ZeroComponentFailsBounds) {
  const Fixture f("queueing_reference");
  const auto record = check_constraints(f.model, WltpVector({0.8, 0.0, 0.2}), FleetConfig{{4}}, f.s.limits);
  EXPECT_FALSE(record.find(kWltpBounds)->pass);
  EXPECT_TRUE(record.find(kWltpSum)->pass);
}

TEST(Constraints, WltpChecksAcceptExactlyValidVectors) {
  const Fixture f("queueing_reference");
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(-0.2, 1.2);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> p(3);
    for (auto& v : p) v = unit(rng);
    if (k % 2 == 0) p[0] = 1.0 - p[1] - p[2];
    const WltpVector wp(p);
    const auto record = check_constraints(f.model, wp, FleetConfig{{4}}, f.s.limits);
    const bool accepted = record.find(kWltpSum)->pass && record.find(kWltpBounds)->pass;
    EXPECT_EQ(accepted, queueing::wltp_violations(wp).empty());
  }
}

TEST(Candidates, PlannerSmallHas28) {
  const Fixture f("planner_small");
  EXPECT_EQ(count_candidates(f.s.fleet->candidates(), f.s.limits.c_max), 28u);
  const auto all = enumerate_candidates(f.s.fleet->candidates(), f.s.limits.c_max);
  ASSERT_EQ(all.size(), 28u);
  EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
}

TEST(Plan, NeverDominatedAndDeterministic) {
  const Fixture f("planner_small");
  const auto a = plan_fleet(f.model, f.nominal(), f.s.fleet->candidates(), f.s.limits);
  const auto b = plan_fleet(f.model, f.nominal(), f.s.fleet->candidates(), f.s.limits);
  EXPECT_EQ(a.mode, SearchMode::exhaustive);
  EXPECT_EQ(a.examined.size(), 28u);
  for (const auto& o : a.examined) {
    if (o.feasible) EXPECT_GE(o.worst_case->v_star, a.worst_case.v_star - 1e-8);
  }
  EXPECT_EQ(a.c_star, b.c_star);
  EXPECT_EQ(a.worst_case.v_star, b.worst_case.v_star);
  EXPECT_EQ(a.worst_case.p_star, b.worst_case.p_star);
  EXPECT_EQ(a.worst_case.x_star, b.worst_case.x_star);
  EXPECT_EQ(a.nominal_wip, b.nominal_wip);
}

TEST(Plan, RelaxingFleetLimitNeverIncreasesVStar) {
  const Fixture f("planner_small");
  double last = std::numeric_limits<double>::infinity();
  for (int c_max = 5; c_max <= 7; ++c_max) {
    auto limits = f.s.limits;
    limits.c_max = c_max;
    const auto result = plan_fleet(f.model, f.nominal(), f.s.fleet->candidates(), limits);
    EXPECT_LE(result.worst_case.v_star, last) << "c_max = " << c_max;
    last = result.worst_case.v_star;
  }
}

TEST(Plan, SingleCandidateReturnedUnchanged) {
  const Fixture f("planner_small");
  const FleetCandidates only{{3, 3}, {3, 3}};
  const auto result = plan_fleet(f.model, f.nominal(), only, f.s.limits);
  EXPECT_EQ(result.c_star, (FleetConfig{{3, 3}}));
  EXPECT_EQ(result.examined.size(), 1u);
}

TEST(Plan, ZeroFleetLimitIsInfeasible) {
  const Fixture f("planner_small");
  auto limits = f.s.limits;
  limits.c_max = 0;
  try {
    (void)plan_fleet(f.model, f.nominal(), f.s.fleet->candidates(), limits);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_feasible_fleet);
  }
}

TEST(Plan, TieBreakPrefersSmallerFleetThenLexicographic) {
  EXPECT_TRUE(better_candidate(1.0, FleetConfig{{5, 5}}, 2.0, FleetConfig{{1, 1}}));
  EXPECT_TRUE(better_candidate(1.0, FleetConfig{{1, 2}}, 1.0, FleetConfig{{2, 2}}));
  EXPECT_TRUE(better_candidate(1.0, FleetConfig{{1, 2}}, 1.0, FleetConfig{{2, 1}}));
  EXPECT_FALSE(better_candidate(1.0, FleetConfig{{2, 1}}, 1.0, FleetConfig{{1, 2}}));
}

TEST(Exceedance, FrequencyIsAFractionAndSeeded) {
  const Fixture f("queueing_reference");
  const FleetConfig c{{4}};
  const double a = exceedance_frequency(f.model, f.nominal(), c, 2.0, 100.0, 500, 7);
  const double b = exceedance_frequency(f.model, f.nominal(), c, 2.0, 100.0, 500, 7);
  EXPECT_EQ(a, b);
  EXPECT_GE(a, 0.0);
  EXPECT_LE(a, 1.0);
  EXPECT_EQ(exceedance_frequency(f.model, f.nominal(), c, 1e9, 100.0, 200, 7), 0.0);
}

TEST(Limits, Violations) {
  PlannerLimits limits;
  EXPECT_TRUE(limit_violations(limits).empty());
  limits.eta = 0.6;
  limits.epsilon = -1.0;
  EXPECT_GE(limit_violations(limits).size(), 2u);
}

}  // namespace
}  // namespace fabflow::planner
