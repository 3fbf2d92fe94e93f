#include <benchmark/benchmark.h>

#include "fabflow/fixtures.hpp"
#include "fabflow/netflow.hpp"
#include "fabflow/queueing.hpp"
#include "fabflow/robust_planner.hpp"
#include "fabflow/scheduler.hpp"

namespace {

using namespace fabflow;

void BM_MaxFlowOptimizedFixture(benchmark::State& state) {
  const auto net = netflow::build_network(scenario::load_fixture("fig10_optimized").network);
  for (auto _ : state) benchmark::DoNotOptimize(netflow::max_flow(net).value);
}
BENCHMARK(BM_MaxFlowOptimizedFixture);

void BM_MinCostBaselineFixture(benchmark::State& state) {
  const auto s = scenario::load_fixture("fig9_baseline");
  const auto net = netflow::build_network(s.network);
  for (auto _ : state) benchmark::DoNotOptimize(netflow::min_cost_flow(net, *s.demand_kg).cost_micros);
}
BENCHMARK(BM_MinCostBaselineFixture);

void BM_TotalWip(benchmark::State& state) {
  const auto s = scenario::load_fixture("planner_small");
  const auto model = s.queueing->model();
  const auto c = s.fleet->nominal_config();
  for (auto _ : state) benchmark::DoNotOptimize(queueing::total_wip(model, s.queueing->nominal_p, c));
}
BENCHMARK(BM_TotalWip);

void BM_WipGradient(benchmark::State& state) {
  const auto s = scenario::load_fixture("planner_small");
  const auto model = s.queueing->model();
  const auto c = s.fleet->nominal_config();
  for (auto _ : state) benchmark::DoNotOptimize(queueing::wip_gradient(model, s.queueing->nominal_p, c));
}
BENCHMARK(BM_WipGradient);

void BM_WorstCaseDirection(benchmark::State& state) {
  const auto s = scenario::load_fixture("queueing_reference");
  const auto model = s.queueing->model();
  const queueing::FleetConfig c{{static_cast<int>(state.range(0))}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(planner::worst_case_direction(model, c, s.limits, s.queueing->nominal_p).v_star);
  }
}
BENCHMARK(BM_WorstCaseDirection)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_PlanFleetSmall(benchmark::State& state) {
  const auto s = scenario::load_fixture("planner_small");
  const auto model = s.queueing->model();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        planner::plan_fleet(model, s.queueing->nominal_p, s.fleet->candidates(), s.limits).worst_case.v_star);
  }
}
BENCHMARK(BM_PlanFleetSmall)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_GaTypeA(benchmark::State& state) {
  const auto s = scenario::load_fixture("table1_bench");
  const auto problem = s.scheduling->problem().only(scheduler::TaskType::A);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scheduler::ga_optimize(problem, s.metaheuristics.ga, seed++).members.size());
  }
}
BENCHMARK(BM_GaTypeA)->Unit(benchmark::kMillisecond);

void BM_SaTypeA(benchmark::State& state) {
  const auto s = scenario::load_fixture("table1_bench");
  const auto problem = s.scheduling->problem().only(scheduler::TaskType::A);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(scheduler::sa_optimize(problem, s.metaheuristics.sa, seed++).scalar);
}
BENCHMARK(BM_SaTypeA)->Unit(benchmark::kMillisecond);

void BM_AcoTypeA(benchmark::State& state) {
  const auto s = scenario::load_fixture("table1_bench");
  const auto problem = s.scheduling->problem().only(scheduler::TaskType::A);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(scheduler::aco_optimize(problem, s.metaheuristics.aco, seed++).scalar);
  }
}
BENCHMARK(BM_AcoTypeA)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
