#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fabflow/error.hpp"
#include "fabflow/fixtures.hpp"
#include "fabflow/queueing.hpp"
#include "fabflow/simplex.hpp"
#include "models.hpp"
#include "oracles.hpp"

namespace fabflow::queueing {
namespace {

constexpr double kExact = 1e-12;
constexpr double kHandDerived = 1e-10;

const WltpVector kHalf{{0.5, 0.5}};
const FleetConfig kNoFleet{};

TEST(TrafficEquations, HandSolvedCases) {
  EXPECT_NEAR(traffic_equations(models::single_station(1.0, 2.0), kHalf)[0], 1.0, kExact);
  const auto tandem = traffic_equations(models::tandem(1.0, 2.0, 4.0), kHalf);
  EXPECT_NEAR(tandem[0], 1.0, kHandDerived);
  EXPECT_NEAR(tandem[1], 1.0, kHandDerived);
  EXPECT_NEAR(traffic_equations(models::feedback(1.0, 4.0, 0.5), kHalf)[0], 2.0, kHandDerived);
}

TEST(TrafficEquations, ClosedNetworkRejected) {
  try {
    (void)traffic_equations(models::feedback(1.0, 4.0, 1.0), kHalf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_open_network);
  }
}

TEST(TrafficEquations, AgreesWithFixedPointAndResidualBound) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = models::random_stable_instance(rng, 0.9);
    const auto lambda = traffic_equations(inst.model, inst.p);
    const auto reference = oracle::fixed_point_traffic(inst.model, inst.p);
    const auto r = inst.model.matrix(inst.p);
    const std::size_t n = lambda.size();
    for (std::size_t j = 0; j < n; ++j) {
      double rhs = inst.model.stations()[j].gamma;
      for (std::size_t i = 0; i < n; ++i) rhs += r[i * n + j] * lambda[i];
      EXPECT_LE(std::abs(lambda[j] - rhs), 1e-10);
      EXPECT_NEAR(lambda[j], reference[j], 1e-9 * std::max(1.0, reference[j]));
    }
  }
}

TEST(Wip, ClosedForms) {
  EXPECT_NEAR(total_wip(models::single_station(1.0, 2.0), kHalf, kNoFleet), 1.0, kExact);
  // ρ = 1/2 and 1/4.
  EXPECT_NEAR(total_wip(models::tandem(1.0, 2.0, 4.0), kHalf, kNoFleet), 1.0 + 1.0 / 3.0, kHandDerived);
  // λ = 2, ρ = 1/2.
  EXPECT_NEAR(total_wip(models::feedback(1.0, 4.0, 0.5), kHalf, kNoFleet), 1.0, kHandDerived);
  // Two pooled vehicles of rate 1.
  const auto transport = wip(models::transport_only(1.0, 1.0), kHalf, FleetConfig{{2}});
  EXPECT_NEAR(transport.utilizations[0], 0.5, kExact);
  EXPECT_NEAR(transport.total_wip, 1.0, kExact);
}

TEST(Wip, BoundaryIsUnstable) {
  try {
    (void)wip(models::single_station(2.0, 2.0), kHalf, kNoFleet);
    FAIL();
  } catch (const UnstableStationError& e) {
    EXPECT_EQ(e.code(), Errc::unstable_station);
    EXPECT_EQ(e.station_id(), "S");
    EXPECT_DOUBLE_EQ(e.utilization(), 1.0);
  }
}

TEST(Wip, LoadedTransportWithoutVehicles) {
  try {
    (void)wip(models::transport_only(1.0, 1.0), kHalf, FleetConfig{{0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::zero_vehicles);
  }
}

TEST(Wip, StrictlyIncreasingInArrivalsAndDecreasingInService) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = models::random_stable_instance(rng, 0.8);
    const double base = total_wip(inst.model, inst.p, inst.c);
    for (std::size_t s = 0; s < inst.model.station_count(); ++s) {
      auto stations = inst.model.stations();
      stations[s].mu_base *= 1.05;
      const RoutingModel faster(stations, inst.model.bindings(), inst.model.wltp_size());
      EXPECT_LT(total_wip(faster, inst.p, inst.c), base);
    }
    auto stations = inst.model.stations();
    stations[0].gamma *= 1.05;
    const RoutingModel busier(stations, inst.model.bindings(), inst.model.wltp_size());
    const auto before = wip(inst.model, inst.p, inst.c);
    const auto after = wip(busier, inst.p, inst.c);
    for (std::size_t s = 0; s < before.per_station_wip.size(); ++s) {
      EXPECT_GT(after.arrival_rates[s], before.arrival_rates[s]);
      EXPECT_GT(after.per_station_wip[s], before.per_station_wip[s]);
    }
  }
}

TEST(Wip, AddingAVehicleNeverIncreasesWip) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = models::random_stable_instance(rng, 0.9);
    auto more = inst.c;
    ++more.counts[0];
    EXPECT_LE(total_wip(inst.model, inst.p, more), total_wip(inst.model, inst.p, inst.c));
  }
  const auto fixture = scenario::load_fixture("queueing_reference");
  const auto model = fixture.queueing->model();
  double last = std::numeric_limits<double>::infinity();
  for (int c = 2; c <= 8; ++c) {
    const double w = total_wip(model, fixture.queueing->nominal_p, FleetConfig{{c}});
    EXPECT_LE(w, last);
    last = w;
  }
}

TEST(Gradient, ConstantModelHasZeroGradient) {
  const auto g = wip_gradient(models::constant_model(), WltpVector({0.2, 0.3, 0.5}), kNoFleet);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
}

TEST(Gradient, SplitModelMatchesSymbolicDerivative) {
  const double gamma = 1.0, mu0 = 3.0, mu1 = 2.0;
  for (double p1 : {0.1, 0.4, 0.7, 0.9}) {
    const auto g = wip_gradient(models::split(gamma, mu0, mu1), WltpVector({1.0 - p1, p1}), kNoFleet);
    const double rho = gamma * p1 / mu1;
    const double exact = (gamma / mu1) / ((1.0 - rho) * (1.0 - rho));
    EXPECT_NEAR(g[0], exact, 1e-6 * exact) << "p1 = " << p1;
  }
}

TEST(Gradient, AgreesWithTruncationCorrectedForwardDifference) {
  // Forward differences carry an O(h) bias of (h/2)·W''; removing it leaves
  // only higher-order terms, so the comparison isolates the library gradient.
  constexpr double kRelTol = 1e-4;
  constexpr double kStep = 1e-4;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = models::random_stable_instance(rng, 0.9);
    const auto g = wip_gradient(inst.model, inst.p, inst.c);
    const auto ref = oracle::forward_gradient(inst.model, inst.p, inst.c, kStep);
    const auto d2 = oracle::forward_second_difference(inst.model, inst.p, inst.c, kStep);
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_LE(std::abs(g[i] - (ref[i] - 0.5 * kStep * d2[i])), kRelTol * scale);
    }
  }
}

TEST(Gradient, PositiveOnReferenceFixture) {
  const auto fixture = scenario::load_fixture("queueing_reference");
  const auto g = wip_gradient(fixture.queueing->model(), fixture.queueing->nominal_p,
                              fixture.fleet->nominal_config());
  for (double v : g) EXPECT_GT(v, 0.0);
}

TEST(DirectionalDerivative, ZeroAndSignFlip) {
  const auto fixture = scenario::load_fixture("queueing_reference");
  const auto model = fixture.queueing->model();
  const auto& p = fixture.queueing->nominal_p;
  const auto c = fixture.fleet->nominal_config();
  const std::vector<double> zero(3, 0.0);
  EXPECT_EQ(directional_derivative(model, p, zero, c), 0.0);
  const std::vector<double> x{-0.5, 0.75, -0.25};
  const std::vector<double> neg{0.5, -0.75, 0.25};
  EXPECT_DOUBLE_EQ(directional_derivative(model, p, neg, c), -directional_derivative(model, p, x, c));
}

TEST(DirectionalDerivative, LinearInDirection) {
  const std::vector<double> g{1.7, -0.4, 2.2};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(4), b(4), mix(4);
    double sa = 0.0, sb = 0.0;
    for (int i = 0; i < 4; ++i) {
      sa += (a[i] = normal(rng));
      sb += (b[i] = normal(rng));
    }
    a[0] -= sa;
    b[0] -= sb;
    const double alpha = normal(rng), beta = normal(rng);
    for (int i = 0; i < 4; ++i) mix[i] = alpha * a[i] + beta * b[i];
    EXPECT_NEAR(directional_derivative(g, mix),
                alpha * directional_derivative(g, a) + beta * directional_derivative(g, b), 1e-10);
  }
}

TEST(DirectionalDerivative, RejectsOffSimplexDirections) {
  const std::vector<double> g{1.0};
  const std::vector<double> x{0.5, 0.6};
  try {
    (void)directional_derivative(g, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_direction);
  }
}

TEST(DirectionalDerivative, ProjectedGradientIsTheMaximum) {
  const auto fixture = scenario::load_fixture("queueing_reference");
  const auto model = fixture.queueing->model();
  const auto& p = fixture.queueing->nominal_p;
  const auto c = fixture.fleet->nominal_config();
  const auto g = wip_gradient(model, p, c);
  auto t = simplex::tangent_from_free(g);
  const double best = simplex::norm2(t);
  for (auto& v : t) v /= best;
  EXPECT_NEAR(directional_derivative(g, t), best, 1e-12 * best);

  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> x(3);
    for (auto& v : x) v = normal(rng);
    const double mean = (x[0] + x[1] + x[2]) / 3.0;
    for (auto& v : x) v -= mean;
    const double len = simplex::norm2(x);
    for (auto& v : x) v /= len;
    ASSERT_LE(directional_derivative(g, x), best * (1.0 + 1e-12));
  }
}

TEST(Monotonicity, ReferenceFixturePassesEveryClaim) {
  const auto fixture = scenario::load_fixture("queueing_reference");
  const auto grid = fixture.queueing->grid_points();
  ASSERT_EQ(grid.size(), 400u);
  const auto report = check_monotonicity(fixture.queueing->model(), grid, fixture.fleet->nominal_config());
  EXPECT_TRUE(report.all_pass("positive_gradient"));
  EXPECT_TRUE(report.all_pass("decreasing_in_p0"));
  EXPECT_TRUE(report.all_pass("increasing_in_pi"));
  // One row per gradient component.
  EXPECT_EQ(report.count("positive_gradient"), 2u);
}

TEST(Monotonicity, AdversarialFixtureIsFlagged) {
  const auto fixture = scenario::load_fixture("queueing_adversarial");
  ASSERT_FALSE(fixture.fleet.has_value());
  const auto report = check_monotonicity(fixture.queueing->model(), fixture.queueing->grid_points(), kNoFleet);
  EXPECT_FALSE(report.all_pass("positive_gradient"));
  const auto v = report.first_violation("positive_gradient");
  ASSERT_TRUE(v.has_value());
  EXPECT_FALSE(v->violating_points.empty());
}

TEST(Monotonicity, ConstantModelTriviallyMonotone) {
  const auto grid = box_grid(3, 0.1, 0.4, 4);
  const auto report = check_monotonicity(models::constant_model(), grid, kNoFleet);
  EXPECT_TRUE(report.all_pass("decreasing_in_p0"));
  EXPECT_TRUE(report.all_pass("increasing_in_pi"));
}

TEST(Wltp, Violations) {
  EXPECT_TRUE(wltp_violations(WltpVector({0.3, 0.7})).empty());
  EXPECT_FALSE(sums_to_one(WltpVector({0.3, 0.6})));
  EXPECT_FALSE(strictly_inside_unit_interval(WltpVector({0.0, 1.0})));
  EXPECT_EQ(wltp_violations(WltpVector({0.0, 0.9})).size(), 2u);
}

}  // namespace
}  // namespace fabflow::queueing
