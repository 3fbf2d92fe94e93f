#pragma once

// Task-to-vehicle assignment for wafer-lot transport.
//
// Vehicles move at constant speed with fixed load/unload times and never
// fail. A vehicle carries one task per dispatch round; the tasks assigned
// to a vehicle are served back to back, one round each.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fabflow::scheduler {

/// A: processing, B: testing, C: packaging, D: shipping, E: distribution.
enum class TaskType { A, B, C, D, E };

inline constexpr TaskType kAllTaskTypes[] = {TaskType::A, TaskType::B, TaskType::C, TaskType::D,
                                             TaskType::E};

std::string_view to_string(TaskType type);
std::optional<TaskType> parse_task_type(std::string_view text);

struct TransportTask {
  std::string id;
  TaskType type = TaskType::A;
  std::string origin;
  std::string destination;
  double lot_mass_kg = 1.0;
  double baseline_duration_h = 0.0;

  friend bool operator==(const TransportTask&, const TransportTask&) = default;
};

struct VehicleSpec {
  std::string id;
  double speed = 1.0;  // distance units per hour
  double load_time_h = 0.0;
  double unload_time_h = 0.0;
  double cost_rate = 0.0;  // currency per busy hour

  friend bool operator==(const VehicleSpec&, const VehicleSpec&) = default;
};

/// Directed origin → destination distances.
class DistanceTable {
 public:
  void set(const std::string& from, const std::string& to, double distance);
  std::optional<double> find(const std::string& from, const std::string& to) const;
  const std::map<std::pair<std::string, std::string>, double>& entries() const { return entries_; }

  friend bool operator==(const DistanceTable&, const DistanceTable&) = default;

 private:
  std::map<std::pair<std::string, std::string>, double> entries_;
};

enum class ProductivityMode { per_makespan, per_busy_time };

struct SchedulingProblem {
  std::vector<TransportTask> tasks;
  std::vector<VehicleSpec> vehicles;
  DistanceTable distances;
  ProductivityMode productivity = ProductivityMode::per_makespan;

  /// The sub-problem holding only tasks of one type (same fleet and distances).
  SchedulingProblem only(TaskType type) const;
};

/// task index → vehicle index.
using Assignment = std::vector<std::size_t>;

struct ObjectiveVector {
  double total_cost = 0.0;
  double makespan = 0.0;
  double productivity = 0.0;

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// Minimise cost and makespan, maximise productivity.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

/// Travel plus handling time of `task` on `vehicle`. Throws Error{missing_distance}.
double task_time(const SchedulingProblem& problem, std::size_t task, std::size_t vehicle);

/// Precomputed task_time for every (task, vehicle).
class TimeTable {
 public:
  explicit TimeTable(const SchedulingProblem& problem);

  double operator()(std::size_t task, std::size_t vehicle) const { return times_[task * vehicles_ + vehicle]; }
  std::size_t tasks() const { return tasks_; }
  std::size_t vehicles() const { return vehicles_; }

 private:
  std::size_t tasks_;
  std::size_t vehicles_;
  std::vector<double> times_;
};

struct TaskTiming {
  std::size_t vehicle = 0;
  std::size_t round = 0;
  double start_h = 0.0;
  double completion_h = 0.0;
};

struct ScheduleDetail {
  std::vector<TaskTiming> tasks;
  ObjectiveVector objectives;
};

/// Rounds derived from the assignment: each vehicle serves its tasks in
/// shortest-time-first order (ties by task id), so the result does not
/// depend on the order tasks are listed in.
ScheduleDetail simulate(const SchedulingProblem& problem, const Assignment& assignment);

/// Explicit rounds (task index → round). Throws
/// Error{overloaded_vehicle_round} if a vehicle gets two tasks in one round.
ScheduleDetail simulate(const SchedulingProblem& problem, const Assignment& assignment,
                        std::span<const std::size_t> rounds);

ObjectiveVector evaluate_schedule(const SchedulingProblem& problem, const Assignment& assignment);
ObjectiveVector evaluate_schedule(const SchedulingProblem& problem, const Assignment& assignment,
                                  std::span<const std::size_t> rounds);

/// Fast path used by the optimisers.
ObjectiveVector evaluate(const TimeTable& times, const SchedulingProblem& problem,
                         std::span<const std::size_t> assignment);

struct ParetoMember {
  Assignment assignment;
  ObjectiveVector objectives;
};

struct ParetoSet {
  std::vector<ParetoMember> members;

  /// True when no member dominates another.
  bool is_non_dominated() const;
  const ParetoMember& best_makespan() const;
  const ParetoMember& best_cost() const;
};

/// Keeps the non-dominated members, one per distinct assignment.
ParetoSet non_dominated(std::vector<ParetoMember> candidates);

/// Every task sent to one vehicle.
Assignment unoptimized_dispatch(const SchedulingProblem& problem, std::size_t vehicle);

struct GaParams {
  int population = 100;
  int generations = 200;
  double crossover_rate = 0.9;
  /// Per-gene mutation probability; 1 / num_tasks when unset.
  std::optional<double> mutation_rate;

  friend bool operator==(const GaParams&, const GaParams&) = default;
};

struct SaParams {
  double t0 = 10.0;
  double cooling = 0.95;
  int iterations_per_temperature = 200;
  double t_min = 1e-3;
  int normalization_samples = 100;

  friend bool operator==(const SaParams&, const SaParams&) = default;
};

struct AcoParams {
  int ants = 20;
  int iterations = 100;
  double evaporation = 0.5;
  double pheromone_init = 1.0;
  double alpha = 1.0;  // pheromone exponent
  double beta = 1.0;   // heuristic exponent
  int normalization_samples = 100;

  friend bool operator==(const AcoParams&, const AcoParams&) = default;
};

struct MetaheuristicParams {
  GaParams ga;
  SaParams sa;
  AcoParams aco;
  std::vector<std::uint64_t> benchmark_seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  friend bool operator==(const MetaheuristicParams&, const MetaheuristicParams&) = default;
};

/// Elitist non-dominated-sorting GA with crowding-distance selection.
ParetoSet ga_optimize(const SchedulingProblem& problem, const GaParams& params, std::uint64_t seed);

/// Min-max normalisation bounds taken from a seeded random sample of assignments.
struct Scalarizer {
  double cost_min = 0.0, cost_span = 1.0;
  double makespan_min = 0.0, makespan_span = 1.0;

  static Scalarizer from_sample(const TimeTable& times, const SchedulingProblem& problem,
                                int samples, std::uint64_t seed);
  /// Equal weights on normalised cost and makespan.
  double operator()(const ObjectiveVector& o) const;
};

struct SingleObjectiveResult {
  Assignment assignment;
  ObjectiveVector objectives;
  double scalar = 0.0;
};

SingleObjectiveResult sa_optimize(const SchedulingProblem& problem, const SaParams& params,
                                  std::uint64_t seed);
SingleObjectiveResult aco_optimize(const SchedulingProblem& problem, const AcoParams& params,
                                   std::uint64_t seed);

struct BenchmarkRow {
  std::string method;  // "ga", "sa", "aco"
  TaskType task_type = TaskType::A;
  double before_hours = 0.0;  // baseline_duration of the type (scenario data)
  double after_hours = 0.0;   // median best makespan over seeds
  std::size_t seed_count = 0;
  double unoptimized_hours = 0.0;  // makespan of the unoptimized dispatch
  double before_cost = 0.0;        // cost of the unoptimized dispatch
  double after_cost = 0.0;         // median cost of the best-makespan schedule
};

struct BenchmarkTable {
  std::vector<BenchmarkRow> rows;

  const BenchmarkRow* find(std::string_view method, TaskType type) const;
};

/// Runs GA, SA and ACO on each task type's sub-problem for every seed.
/// Throws Error{empty_seeds}.
BenchmarkTable benchmark(const SchedulingProblem& problem, const MetaheuristicParams& params,
                         std::span<const std::uint64_t> seeds, std::size_t baseline_vehicle);

}  // namespace fabflow::scheduler
