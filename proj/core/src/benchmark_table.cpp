#include <algorithm>

#include "fabflow/error.hpp"
#include "fabflow/scheduler.hpp"

namespace fabflow::scheduler {

namespace {

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

const BenchmarkRow* BenchmarkTable::find(std::string_view method, TaskType type) const {
  for (const auto& row : rows) {
    if (row.method == method && row.task_type == type) return &row;
  }
  return nullptr;
}

BenchmarkTable benchmark(const SchedulingProblem& problem, const MetaheuristicParams& params,
                         std::span<const std::uint64_t> seeds, std::size_t baseline_vehicle) {
  if (seeds.empty()) throw Error(Errc::empty_seeds, "benchmark needs at least one seed");
  BenchmarkTable table;
  for (auto type : kAllTaskTypes) {
    const auto sub = problem.only(type);
    if (sub.tasks.empty()) continue;

    double before = 0.0;
    for (const auto& t : sub.tasks) before += t.baseline_duration_h;
    const auto unoptimized = evaluate_schedule(sub, unoptimized_dispatch(sub, baseline_vehicle));

    for (std::string_view method : {"ga", "sa", "aco"}) {
      std::vector<double> makespans;
      std::vector<double> costs;
      for (auto seed : seeds) {
        ObjectiveVector best;
        if (method == "ga") {
          best = ga_optimize(sub, params.ga, seed).best_makespan().objectives;
        } else if (method == "sa") {
          best = sa_optimize(sub, params.sa, seed).objectives;
        } else {
          best = aco_optimize(sub, params.aco, seed).objectives;
        }
        makespans.push_back(best.makespan);
        costs.push_back(best.total_cost);
      }
      BenchmarkRow row;
      row.method = std::string(method);
      row.task_type = type;
      row.before_hours = before;
      row.after_hours = median(makespans);
      row.seed_count = seeds.size();
      row.unoptimized_hours = unoptimized.makespan;
      row.before_cost = unoptimized.total_cost;
      row.after_cost = median(std::move(costs));
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace fabflow::scheduler
