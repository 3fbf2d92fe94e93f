#include "fabflow/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fabflow/error.hpp"

namespace fabflow::scheduler {

std::string_view to_string(TaskType type) {
  switch (type) {
    case TaskType::A: return "A";
    case TaskType::B: return "B";
    case TaskType::C: return "C";
    case TaskType::D: return "D";
    case TaskType::E: return "E";
  }
  return "A";
}

std::optional<TaskType> parse_task_type(std::string_view text) {
  for (auto t : kAllTaskTypes) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

void DistanceTable::set(const std::string& from, const std::string& to, double distance) {
  entries_[{from, to}] = distance;
}

std::optional<double> DistanceTable::find(const std::string& from, const std::string& to) const {
  auto it = entries_.find({from, to});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

SchedulingProblem SchedulingProblem::only(TaskType type) const {
  SchedulingProblem sub{{}, vehicles, distances, productivity};
  for (const auto& t : tasks) {
    if (t.type == type) sub.tasks.push_back(t);
  }
  return sub;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  const bool no_worse = a.total_cost <= b.total_cost && a.makespan <= b.makespan &&
                        a.productivity >= b.productivity;
  const bool better = a.total_cost < b.total_cost || a.makespan < b.makespan ||
                      a.productivity > b.productivity;
  return no_worse && better;
}

double task_time(const SchedulingProblem& problem, std::size_t task, std::size_t vehicle) {
  const auto& t = problem.tasks.at(task);
  const auto& v = problem.vehicles.at(vehicle);
  const auto d = problem.distances.find(t.origin, t.destination);
  if (!d) {
    throw Error(Errc::missing_distance,
                "no distance from '" + t.origin + "' to '" + t.destination + "' (task " + t.id + ")");
  }
  return *d / v.speed + v.load_time_h + v.unload_time_h;
}

TimeTable::TimeTable(const SchedulingProblem& problem)
    : tasks_(problem.tasks.size()), vehicles_(problem.vehicles.size()), times_(tasks_ * vehicles_) {
  for (std::size_t t = 0; t < tasks_; ++t) {
    for (std::size_t v = 0; v < vehicles_; ++v) times_[t * vehicles_ + v] = task_time(problem, t, v);
  }
}

namespace {

void check_assignment(const SchedulingProblem& problem, std::span<const std::size_t> assignment) {
  if (assignment.size() != problem.tasks.size()) {
    throw Error(Errc::invalid_schedule, "assignment must cover every task");
  }
  for (auto v : assignment) {
    if (v >= problem.vehicles.size()) throw Error(Errc::invalid_schedule, "assignment names an unknown vehicle");
  }
}

double productivity_of(const SchedulingProblem& problem, double makespan, double busy_total) {
  const double denom = problem.productivity == ProductivityMode::per_makespan ? makespan : busy_total;
  return denom > 0.0 ? static_cast<double>(problem.tasks.size()) / denom : 0.0;
}

ScheduleDetail simulate_rounds(const SchedulingProblem& problem, const Assignment& assignment,
                               std::span<const std::size_t> rounds) {
  check_assignment(problem, assignment);
  const std::size_t n = problem.tasks.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::pair(assignment[a], rounds[a]) < std::pair(assignment[b], rounds[b]);
  });

  ScheduleDetail detail;
  detail.tasks.resize(n);
  std::vector<double> busy(problem.vehicles.size(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto t = order[k];
    const auto v = assignment[t];
    if (k > 0 && assignment[order[k - 1]] == v && rounds[order[k - 1]] == rounds[t]) {
      throw Error(Errc::overloaded_vehicle_round,
                  "vehicle '" + problem.vehicles[v].id + "' holds more than one task in round " +
                      std::to_string(rounds[t]));
    }
    const double duration = task_time(problem, t, v);
    detail.tasks[t] = {v, rounds[t], busy[v], busy[v] + duration};
    busy[v] += duration;
  }

  auto& o = detail.objectives;
  double busy_total = 0.0;
  for (std::size_t v = 0; v < busy.size(); ++v) {
    o.makespan = std::max(o.makespan, busy[v]);
    o.total_cost += busy[v] * problem.vehicles[v].cost_rate;
    busy_total += busy[v];
  }
  o.productivity = productivity_of(problem, o.makespan, busy_total);
  return detail;
}

}  // namespace

ScheduleDetail simulate(const SchedulingProblem& problem, const Assignment& assignment,
                        std::span<const std::size_t> rounds) {
  if (rounds.size() != problem.tasks.size()) {
    throw Error(Errc::invalid_schedule, "round list must cover every task");
  }
  return simulate_rounds(problem, assignment, rounds);
}

ScheduleDetail simulate(const SchedulingProblem& problem, const Assignment& assignment) {
  check_assignment(problem, assignment);
  const std::size_t n = problem.tasks.size();
  std::vector<double> duration(n);
  for (std::size_t t = 0; t < n; ++t) duration[t] = task_time(problem, t, assignment[t]);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (duration[a] != duration[b]) return duration[a] < duration[b];
    return problem.tasks[a].id < problem.tasks[b].id;
  });
  std::vector<std::size_t> rounds(n);
  std::vector<std::size_t> next_round(problem.vehicles.size(), 0);
  for (auto t : order) rounds[t] = next_round[assignment[t]]++;
  return simulate_rounds(problem, assignment, rounds);
}

ObjectiveVector evaluate_schedule(const SchedulingProblem& problem, const Assignment& assignment) {
  return simulate(problem, assignment).objectives;
}

ObjectiveVector evaluate_schedule(const SchedulingProblem& problem, const Assignment& assignment,
                                  std::span<const std::size_t> rounds) {
  return simulate(problem, assignment, rounds).objectives;
}

ObjectiveVector evaluate(const TimeTable& times, const SchedulingProblem& problem,
                         std::span<const std::size_t> assignment) {
  // Accumulate in round order (shortest first) so the sums match simulate() bit for bit.
  std::vector<std::pair<double, std::size_t>> served(assignment.size());
  for (std::size_t t = 0; t < assignment.size(); ++t) served[t] = {times(t, assignment[t]), assignment[t]};
  std::sort(served.begin(), served.end());
  std::vector<double> busy(times.vehicles(), 0.0);
  for (const auto& [duration, v] : served) busy[v] += duration;
  ObjectiveVector o;
  double busy_total = 0.0;
  for (std::size_t v = 0; v < busy.size(); ++v) {
    o.makespan = std::max(o.makespan, busy[v]);
    o.total_cost += busy[v] * problem.vehicles[v].cost_rate;
    busy_total += busy[v];
  }
  o.productivity = productivity_of(problem, o.makespan, busy_total);
  return o;
}

bool ParetoSet::is_non_dominated() const {
  for (const auto& a : members) {
    for (const auto& b : members) {
      if (dominates(a.objectives, b.objectives)) return false;
    }
  }
  return true;
}

const ParetoMember& ParetoSet::best_makespan() const {
  if (members.empty()) throw Error(Errc::invalid_argument, "empty Pareto set");
  return *std::min_element(members.begin(), members.end(), [](const auto& a, const auto& b) {
    return std::pair(a.objectives.makespan, a.objectives.total_cost) <
           std::pair(b.objectives.makespan, b.objectives.total_cost);
  });
}

const ParetoMember& ParetoSet::best_cost() const {
  if (members.empty()) throw Error(Errc::invalid_argument, "empty Pareto set");
  return *std::min_element(members.begin(), members.end(), [](const auto& a, const auto& b) {
    return std::pair(a.objectives.total_cost, a.objectives.makespan) <
           std::pair(b.objectives.total_cost, b.objectives.makespan);
  });
}

ParetoSet non_dominated(std::vector<ParetoMember> candidates) {
  ParetoSet out;
  std::set<Assignment> seen;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < candidates.size() && !dominated; ++j) {
      dominated = j != i && dominates(candidates[j].objectives, candidates[i].objectives);
    }
    if (!dominated && seen.insert(candidates[i].assignment).second) {
      out.members.push_back(std::move(candidates[i]));
    }
  }
  std::sort(out.members.begin(), out.members.end(), [](const auto& a, const auto& b) {
    return std::tie(a.objectives.makespan, a.objectives.total_cost, a.assignment) <
           std::tie(b.objectives.makespan, b.objectives.total_cost, b.assignment);
  });
  return out;
}

Assignment unoptimized_dispatch(const SchedulingProblem& problem, std::size_t vehicle) {
  if (vehicle >= problem.vehicles.size()) throw Error(Errc::invalid_argument, "unknown baseline vehicle");
  return Assignment(problem.tasks.size(), vehicle);
}

}  // namespace fabflow::scheduler
