#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fabflow/error.hpp"
#include "fabflow/fixtures.hpp"
#include "fabflow/scheduler.hpp"
#include "oracles.hpp"

namespace fabflow::scheduler {
namespace {

SchedulingProblem one_task(double distance, double speed, double load, double unload) {
  SchedulingProblem p;
  p.tasks.push_back({"t0", TaskType::A, "O", "D", 1.0, 1.0});
  p.vehicles.push_back({"v0", speed, load, unload, 10.0});
  p.distances.set("O", "D", distance);
  return p;
}

SchedulingProblem two_tasks(std::size_t vehicles) {
  SchedulingProblem p;
  p.tasks = {{"t0", TaskType::A, "O", "D", 1.0, 1.0}, {"t1", TaskType::B, "O", "E", 1.0, 1.0}};
  for (std::size_t v = 0; v < vehicles; ++v) p.vehicles.push_back({"v" + std::to_string(v), 2.0, 0.5, 0.5, 10.0});
  p.distances.set("O", "D", 4.0);  // 3.0 h
  p.distances.set("O", "E", 8.0);  // 5.0 h
  return p;
}

std::vector<ObjectiveVector> sorted_objectives(const ParetoSet& set) {
  std::vector<ObjectiveVector> out;
  for (const auto& m : set.members) out.push_back(m.objectives);
  auto key = [](const ObjectiveVector& o) { return std::tuple(o.total_cost, o.makespan, o.productivity); };
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TEST(Evaluate, SingleTaskClosedForm) {
  const auto p = one_task(10.0, 5.0, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(task_time(p, 0, 0), 3.0);
  const auto o = evaluate_schedule(p, {0});
  EXPECT_DOUBLE_EQ(o.makespan, 3.0);
  EXPECT_DOUBLE_EQ(o.total_cost, 30.0);
}

TEST(Evaluate, SequentialAndParallelRounds) {
  EXPECT_DOUBLE_EQ(evaluate_schedule(two_tasks(1), {0, 0}).makespan, 8.0);
  const auto p = two_tasks(2);
  EXPECT_DOUBLE_EQ(evaluate_schedule(p, {0, 1}).makespan, 5.0);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& a : oracle::all_assignments(2, 2)) best = std::min(best, evaluate_schedule(p, a).makespan);
  EXPECT_DOUBLE_EQ(best, 5.0);
}

TEST(Evaluate, ShortestTaskServedFirst) {
  const auto detail = simulate(two_tasks(1), {0, 0});
  EXPECT_EQ(detail.tasks[0].round, 0u);
  EXPECT_EQ(detail.tasks[1].round, 1u);
  EXPECT_DOUBLE_EQ(detail.tasks[1].start_h, 3.0);
}

TEST(Evaluate, ExplicitRoundsAndErrors) {
  const auto p = two_tasks(1);
  const std::vector<std::size_t> same_round{0, 0};
  try {
    (void)evaluate_schedule(p, {0, 0}, same_round);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::overloaded_vehicle_round);
  }
  auto missing = p;
  missing.distances = {};
  try {
    (void)task_time(missing, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::missing_distance);
  }
}

TEST(Evaluate, PermutationInvariant) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = oracle::random_problem(rng, 6, 3);
    Assignment a(6);
    for (auto& v : a) v = rng() % 3;
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto shuffled = p;
    Assignment b(6);
    for (std::size_t k = 0; k < 6; ++k) {
      shuffled.tasks[k] = p.tasks[perm[k]];
      b[k] = a[perm[k]];
    }
    EXPECT_EQ(evaluate_schedule(p, a), evaluate_schedule(shuffled, b));
  }
}

TEST(Evaluate, FastPathMatchesSimulationExactly) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = oracle::random_problem(rng, 7, 3);
    const TimeTable times(p);
    Assignment a(7);
    for (auto& v : a) v = rng() % 3;
    EXPECT_EQ(evaluate(times, p, a), evaluate_schedule(p, a));
  }
}

TEST(Evaluate, IdleVehicleNeverWorsensOptimalMakespan) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = oracle::random_problem(rng, 4, 2);
    auto bigger = p;
    bigger.vehicles.push_back({"extra", 1.0 + rng() % 4, 0.3, 0.3, 20.0});
    auto best = [](const SchedulingProblem& q) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& a : oracle::all_assignments(q.tasks.size(), q.vehicles.size())) {
        m = std::min(m, evaluate_schedule(q, a).makespan);
      }
      return m;
    };
    EXPECT_LE(best(bigger), best(p));
  }
}

TEST(Dominance, Semantics) {
  const ObjectiveVector a{1.0, 1.0, 2.0};
  EXPECT_TRUE(dominates(a, {1.0, 2.0, 2.0}));
  EXPECT_TRUE(dominates(a, {1.0, 1.0, 1.0}));
  EXPECT_FALSE(dominates(a, a));
  EXPECT_FALSE(dominates(a, {0.5, 2.0, 2.0}));
}

TEST(Ga, SingleTaskSingleVehicle) {
  const auto front = ga_optimize(one_task(10.0, 5.0, 0.5, 0.5), GaParams{}, 42);
  ASSERT_EQ(front.members.size(), 1u);
  EXPECT_EQ(front.members[0].assignment, (Assignment{0}));
}

TEST(Ga, SmallFrontMatchesBruteForce) {
  std::mt19937_64 rng(42);
  const auto p = oracle::random_problem(rng, 4, 2);
  const auto front = ga_optimize(p, GaParams{}, 42);
  EXPECT_TRUE(front.is_non_dominated());
  EXPECT_EQ(sorted_objectives(front), oracle::brute_force_front(p));
}

TEST(Ga, FrontNeverDominatedAndSeedDeterministic) {
  std::mt19937_64 rng(5);
  const auto p = oracle::random_problem(rng, 8, 3);
  const GaParams params{40, 40, 0.9, std::nullopt};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto a = ga_optimize(p, params, seed);
    const auto b = ga_optimize(p, params, seed);
    EXPECT_TRUE(a.is_non_dominated());
    ASSERT_EQ(a.members.size(), b.members.size());
    for (std::size_t k = 0; k < a.members.size(); ++k) {
      EXPECT_EQ(a.members[k].assignment, b.members[k].assignment);
      EXPECT_EQ(a.members[k].objectives, b.members[k].objectives);
    }
  }
}

TEST(Ga, RejectsBadParams) {
  GaParams params;
  params.population = 0;
  EXPECT_THROW((void)ga_optimize(two_tasks(2), params, 1), Error);
}

TEST(ParetoFilter, KeepsNonDominatedDistinctAssignments) {
  const auto set = non_dominated({{{0}, {1.0, 2.0, 1.0}}, {{1}, {2.0, 1.0, 1.0}}, {{1}, {2.0, 1.0, 1.0}},
                                  {{2}, {3.0, 3.0, 0.5}}});
  EXPECT_EQ(set.members.size(), 2u);
  EXPECT_EQ(set.best_cost().assignment, (Assignment{0}));
  EXPECT_EQ(set.best_makespan().assignment, (Assignment{1}));
}

TEST(SaAco, ForcedAssignment) {
  const auto p = one_task(10.0, 5.0, 0.5, 0.5);
  EXPECT_EQ(sa_optimize(p, SaParams{}, 42).assignment, (Assignment{0}));
  EXPECT_EQ(aco_optimize(p, AcoParams{}, 42).assignment, (Assignment{0}));
}

TEST(SaAco, WithinFivePercentOfOptimumAtSeed42) {
  constexpr double kGap = 0.05;
  std::mt19937_64 rng(42);
  for (int instance = 0; instance < 5; ++instance) {
    const auto p = oracle::random_problem(rng, 4, 2);
    const TimeTable times(p);
    const SaParams sa;
    const AcoParams aco;
    const auto sa_scale = Scalarizer::from_sample(times, p, sa.normalization_samples, 42);
    const auto aco_scale = Scalarizer::from_sample(times, p, aco.normalization_samples, 42);
    const double sa_best = oracle::brute_force_best_scalar(p, sa_scale);
    const double aco_best = oracle::brute_force_best_scalar(p, aco_scale);
    const auto s = sa_optimize(p, sa, 42);
    const auto a = aco_optimize(p, aco, 42);
    EXPECT_LE(sa_scale(s.objectives), sa_best + kGap * std::abs(sa_best)) << "instance " << instance;
    EXPECT_LE(aco_scale(a.objectives), aco_best + kGap * std::abs(aco_best)) << "instance " << instance;
    EXPECT_DOUBLE_EQ(s.scalar, sa_scale(s.objectives));
  }
}

TEST(SaAco, SeedDeterministic) {
  std::mt19937_64 rng(6);
  const auto p = oracle::random_problem(rng, 7, 3);
  EXPECT_EQ(sa_optimize(p, SaParams{}, 9).assignment, sa_optimize(p, SaParams{}, 9).assignment);
  EXPECT_EQ(aco_optimize(p, AcoParams{}, 9).assignment, aco_optimize(p, AcoParams{}, 9).assignment);
}

TEST(Benchmark, EmptySeeds) {
  const auto s = scenario::load_fixture("table1_bench");
  try {
    (void)benchmark(s.scheduling->problem(), s.metaheuristics, {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_seeds);
  }
}

TEST(Benchmark, TableShapeAndBaselineEcho) {
  const auto s = scenario::load_fixture("table1_bench");
  auto params = s.metaheuristics;
  params.ga.population = 20;
  params.ga.generations = 10;
  params.sa.iterations_per_temperature = 10;
  params.aco.iterations = 5;
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto table = benchmark(s.scheduling->problem(), params, seeds, s.scheduling->baseline_index());
  ASSERT_EQ(table.rows.size(), 15u);
  const std::pair<TaskType, double> expected[] = {
      {TaskType::A, 54.0}, {TaskType::B, 30.0}, {TaskType::C, 20.0}, {TaskType::D, 10.0}, {TaskType::E, 21.0}};
  for (auto method : {"ga", "sa", "aco"}) {
    for (const auto& [type, hours] : expected) {
      const auto* row = table.find(method, type);
      ASSERT_NE(row, nullptr);
      EXPECT_EQ(row->before_hours, hours);
      EXPECT_EQ(row->seed_count, 2u);
    }
  }
}

}  // namespace
}  // namespace fabflow::scheduler
