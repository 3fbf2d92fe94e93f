#pragma once

// Independent reference implementations used by the test suites. They favour
// obviously-correct enumeration over speed and share no code paths with the
// library solvers beyond the scalar W evaluation.

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "fabflow/netflow.hpp"
#include "fabflow/queueing.hpp"
#include "fabflow/robust_planner.hpp"
#include "fabflow/scheduler.hpp"

namespace fabflow::oracle {

struct SmallEdge {
  int from;
  int to;
  std::int64_t capacity;
  std::int64_t cost_micros = 0;
};

/// Node 0 is the source, node n-1 the sink.
struct SmallGraph {
  int nodes = 2;
  std::vector<SmallEdge> edges;
};

SmallGraph random_graph(std::mt19937_64& rng, int min_nodes, int max_nodes, std::int64_t max_capacity,
                        double edge_probability, std::int64_t max_cost_units = 0);

/// Source kind for node 0, sink for node n-1, logistics otherwise; ids "n<i>".
netflow::NetworkSpec to_spec(const SmallGraph& g);

/// Minimum over all s-t bipartitions of the forward cut capacity.
std::int64_t brute_force_min_cut(const SmallGraph& g);

/// Cheapest integral flow of exactly `demand` by enumerating every flow
/// vector; nullopt when none exists. Keep Π(capacity+1) small.
std::optional<std::int64_t> brute_force_min_cost(const SmallGraph& g, std::int64_t demand);

/// Largest value over every integral feasible flow (same enumeration).
std::int64_t brute_force_max_flow(const SmallGraph& g);

/// λ = γ + Rᵀλ by plain fixed-point iteration.
std::vector<double> fixed_point_traffic(const queueing::RoutingModel& model, const queueing::WltpVector& p);

/// Forward differences of W along e_i - e_0, i = 1..n.
std::vector<double> forward_gradient(const queueing::RoutingModel& model, const queueing::WltpVector& p,
                                     const queueing::FleetConfig& c, double h);

/// Forward second differences (W(p+2hd) - 2W(p+hd) + W(p)) / h² along
/// d = e_i - e_0, i = 1..n. h/2 times this is the leading truncation error of
/// forward_gradient.
std::vector<double> forward_second_difference(const queueing::RoutingModel& model, const queueing::WltpVector& p,
                                              const queueing::FleetConfig& c, double h);

/// Largest directional derivative over unit x with Σx = 0, from central
/// differences along an orthonormal basis of that subspace. nullopt when a
/// probe is unstable.
std::optional<double> max_directional_derivative(const queueing::RoutingModel& model, const std::vector<double>& p,
                                                 const queueing::FleetConfig& c, double h = 1e-5);

struct GridMaximum {
  std::vector<double> p;
  double v = -1.0;
  std::size_t evaluated = 0;
};

/// Dense grid over a box-capped 3-component simplex followed by two zoomed
/// refinements around the incumbent. `points` is the approximate number of
/// coarse grid points.
GridMaximum grid_worst_case(const queueing::RoutingModel& model, const queueing::FleetConfig& c,
                            const std::vector<double>& lo, const std::vector<double>& hi, std::size_t points = 10000);

struct ExhaustivePlan {
  queueing::FleetConfig c_star;
  double v_star = 0.0;
  std::size_t feasible = 0;
  std::size_t examined = 0;
};

/// Upper level by nested enumeration, lower level by grid_worst_case.
std::optional<ExhaustivePlan> exhaustive_plan(const queueing::RoutingModel& model,
                                              const queueing::WltpVector& p_nominal,
                                              const planner::FleetCandidates& candidates,
                                              const planner::PlannerLimits& limits);

/// Every assignment in lexicographic order.
std::vector<scheduler::Assignment> all_assignments(std::size_t tasks, std::size_t vehicles);

/// Non-dominated objective vectors over all assignments, sorted and deduplicated.
std::vector<scheduler::ObjectiveVector> brute_force_front(const scheduler::SchedulingProblem& problem);

/// Smallest scalarised objective over all assignments.
double brute_force_best_scalar(const scheduler::SchedulingProblem& problem, const scheduler::Scalarizer& s);

/// Random instance with distinct origin/destination pairs.
scheduler::SchedulingProblem random_problem(std::mt19937_64& rng, std::size_t tasks, std::size_t vehicles);

}  // namespace fabflow::oracle
