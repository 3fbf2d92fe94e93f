#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fabflow/error.hpp"
#include "fabflow/scheduler.hpp"

namespace fabflow::scheduler {

namespace {

using Rng = std::mt19937_64;

void require_instance(const SchedulingProblem& problem) {
  if (problem.tasks.empty()) throw Error(Errc::invalid_argument, "scheduling problem has no tasks");
  if (problem.vehicles.empty()) throw Error(Errc::invalid_argument, "scheduling problem has no vehicles");
}

std::size_t random_vehicle(Rng& rng, std::size_t vehicles) {
  return std::uniform_int_distribution<std::size_t>(0, vehicles - 1)(rng);
}

Assignment random_assignment(Rng& rng, std::size_t tasks, std::size_t vehicles) {
  Assignment a(tasks);
  for (auto& g : a) g = random_vehicle(rng, vehicles);
  return a;
}

// A different vehicle than `current`, uniformly.
std::size_t other_vehicle(Rng& rng, std::size_t current, std::size_t vehicles) {
  auto v = std::uniform_int_distribution<std::size_t>(0, vehicles - 2)(rng);
  return v >= current ? v + 1 : v;
}

// --- NSGA-II ----------------------------------------------------------------

struct Individual {
  Assignment genes;
  ObjectiveVector obj;
  std::size_t rank = 0;
  double crowding = 0.0;
};

// Returns fronts as index lists into `pop`; sets rank on each individual.
std::vector<std::vector<std::size_t>> sort_fronts(std::vector<Individual>& pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(pop[p].obj, pop[q].obj)) {
        dominated_by[p].push_back(q);
      } else if (dominates(pop[q].obj, pop[p].obj)) {
        ++domination_count[p];
      }
    }
    if (domination_count[p] == 0) {
      pop[p].rank = 0;
      fronts[0].push_back(p);
    }
  }
  for (std::size_t f = 0; !fronts[f].empty(); ++f) {
    std::vector<std::size_t> next;
    for (auto p : fronts[f]) {
      for (auto q : dominated_by[p]) {
        if (--domination_count[q] == 0) {
          pop[q].rank = f + 1;
          next.push_back(q);
        }
      }
    }
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front) {
  for (auto i : front) pop[i].crowding = 0.0;
  if (front.size() <= 2) {
    for (auto i : front) pop[i].crowding = std::numeric_limits<double>::infinity();
    return;
  }
  auto objective = [&](std::size_t i, int m) {
    const auto& o = pop[i].obj;
    return m == 0 ? o.total_cost : m == 1 ? o.makespan : o.productivity;
  };
  std::vector<std::size_t> order = front;
  for (int m = 0; m < 3; ++m) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return objective(a, m) < objective(b, m); });
    const double lo = objective(order.front(), m);
    const double hi = objective(order.back(), m);
    pop[order.front()].crowding = std::numeric_limits<double>::infinity();
    pop[order.back()].crowding = std::numeric_limits<double>::infinity();
    if (hi <= lo) continue;
    for (std::size_t k = 1; k + 1 < order.size(); ++k) {
      pop[order[k]].crowding += (objective(order[k + 1], m) - objective(order[k - 1], m)) / (hi - lo);
    }
  }
}

bool crowded_less(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.crowding > b.crowding;
}

}  // namespace

ParetoSet ga_optimize(const SchedulingProblem& problem, const GaParams& params, std::uint64_t seed) {
  require_instance(problem);
  if (params.population < 2 || params.generations < 0) {
    throw Error(Errc::invalid_argument, "GA needs population >= 2 and generations >= 0");
  }
  const TimeTable times(problem);
  const std::size_t tasks = problem.tasks.size();
  const std::size_t vehicles = problem.vehicles.size();
  const auto pop_size = static_cast<std::size_t>(params.population);
  const double mutation = params.mutation_rate.value_or(1.0 / static_cast<double>(tasks));
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Individual> pop(pop_size);
  for (auto& ind : pop) {
    ind.genes = random_assignment(rng, tasks, vehicles);
    ind.obj = evaluate(times, problem, ind.genes);
  }
  for (const auto& front : sort_fronts(pop)) assign_crowding(pop, front);

  auto tournament = [&]() -> const Individual& {
    const auto& a = pop[std::uniform_int_distribution<std::size_t>(0, pop_size - 1)(rng)];
    const auto& b = pop[std::uniform_int_distribution<std::size_t>(0, pop_size - 1)(rng)];
    return crowded_less(b, a) ? b : a;
  };
  auto mutate = [&](Assignment& genes) {
    if (vehicles < 2) return;
    for (auto& g : genes) {
      if (unit(rng) < mutation) g = other_vehicle(rng, g, vehicles);
    }
  };

  for (int gen = 0; gen < params.generations; ++gen) {
    std::vector<Individual> merged = pop;
    merged.reserve(2 * pop_size);
    while (merged.size() < 2 * pop_size) {
      Assignment c1 = tournament().genes;
      Assignment c2 = tournament().genes;
      if (unit(rng) < params.crossover_rate) {
        for (std::size_t k = 0; k < tasks; ++k) {
          if (unit(rng) < 0.5) std::swap(c1[k], c2[k]);
        }
      }
      mutate(c1);
      mutate(c2);
      for (auto* child : {&c1, &c2}) {
        if (merged.size() == 2 * pop_size) break;
        Individual ind;
        ind.genes = std::move(*child);
        ind.obj = evaluate(times, problem, ind.genes);
        merged.push_back(std::move(ind));
      }
    }

    std::vector<Individual> next;
    next.reserve(pop_size);
    for (const auto& front : sort_fronts(merged)) {
      assign_crowding(merged, front);
      if (next.size() + front.size() <= pop_size) {
        for (auto i : front) next.push_back(merged[i]);
        continue;
      }
      std::vector<std::size_t> order = front;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return merged[a].crowding > merged[b].crowding;
      });
      for (std::size_t k = 0; next.size() < pop_size; ++k) next.push_back(merged[order[k]]);
      break;
    }
    pop = std::move(next);
  }

  std::vector<ParetoMember> members;
  for (const auto& ind : pop) {
    if (ind.rank == 0) members.push_back({ind.genes, ind.obj});
  }
  return non_dominated(std::move(members));
}

Scalarizer Scalarizer::from_sample(const TimeTable& times, const SchedulingProblem& problem,
                                   int samples, std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  double c_lo = std::numeric_limits<double>::infinity();
  double c_hi = -c_lo;
  double m_lo = c_lo;
  double m_hi = -c_lo;
  for (int s = 0; s < std::max(1, samples); ++s) {
    const auto a = random_assignment(rng, times.tasks(), times.vehicles());
    const auto o = evaluate(times, problem, a);
    c_lo = std::min(c_lo, o.total_cost);
    c_hi = std::max(c_hi, o.total_cost);
    m_lo = std::min(m_lo, o.makespan);
    m_hi = std::max(m_hi, o.makespan);
  }
  Scalarizer z;
  z.cost_min = c_lo;
  z.cost_span = c_hi > c_lo ? c_hi - c_lo : 1.0;
  z.makespan_min = m_lo;
  z.makespan_span = m_hi > m_lo ? m_hi - m_lo : 1.0;
  return z;
}

double Scalarizer::operator()(const ObjectiveVector& o) const {
  return 0.5 * (o.total_cost - cost_min) / cost_span + 0.5 * (o.makespan - makespan_min) / makespan_span;
}

SingleObjectiveResult sa_optimize(const SchedulingProblem& problem, const SaParams& params,
                                  std::uint64_t seed) {
  require_instance(problem);
  if (!(params.t0 > 0.0) || !(params.cooling > 0.0 && params.cooling < 1.0) ||
      !(params.t_min > 0.0) || params.iterations_per_temperature < 1) {
    throw Error(Errc::invalid_argument, "invalid simulated annealing parameters");
  }
  const TimeTable times(problem);
  const std::size_t tasks = problem.tasks.size();
  const std::size_t vehicles = problem.vehicles.size();
  const auto scalar = Scalarizer::from_sample(times, problem, params.normalization_samples, seed);
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Assignment current = random_assignment(rng, tasks, vehicles);
  double current_s = scalar(evaluate(times, problem, current));
  Assignment best = current;
  double best_s = current_s;

  for (double temperature = params.t0; temperature > params.t_min; temperature *= params.cooling) {
    for (int it = 0; it < params.iterations_per_temperature; ++it) {
      if (vehicles < 2) break;
      Assignment trial = current;
      const auto i = std::uniform_int_distribution<std::size_t>(0, tasks - 1)(rng);
      const auto j = std::uniform_int_distribution<std::size_t>(0, tasks - 1)(rng);
      // Swap the carriers of two tasks; fall back to moving one task when
      // the swap would be a no-op.
      if (trial[i] != trial[j] && unit(rng) < 0.5) {
        std::swap(trial[i], trial[j]);
      } else {
        trial[i] = other_vehicle(rng, trial[i], vehicles);
      }
      const double s = scalar(evaluate(times, problem, trial));
      const double delta = s - current_s;
      if (delta <= 0.0 || unit(rng) < std::exp(-delta / temperature)) {
        current = std::move(trial);
        current_s = s;
        if (current_s < best_s) {
          best_s = current_s;
          best = current;
        }
      }
    }
  }
  return {best, evaluate(times, problem, best), best_s};
}

SingleObjectiveResult aco_optimize(const SchedulingProblem& problem, const AcoParams& params,
                                   std::uint64_t seed) {
  require_instance(problem);
  if (params.ants < 1 || params.iterations < 1 || !(params.evaporation > 0.0 && params.evaporation <= 1.0) ||
      !(params.pheromone_init > 0.0)) {
    throw Error(Errc::invalid_argument, "invalid ant colony parameters");
  }
  const TimeTable times(problem);
  const std::size_t tasks = problem.tasks.size();
  const std::size_t vehicles = problem.vehicles.size();
  const auto scalar = Scalarizer::from_sample(times, problem, params.normalization_samples, seed);
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> pheromone(tasks * vehicles, params.pheromone_init);
  std::vector<double> desirability(tasks * vehicles);
  for (std::size_t t = 0; t < tasks; ++t) {
    for (std::size_t v = 0; v < vehicles; ++v) {
      desirability[t * vehicles + v] = std::pow(1.0 / times(t, v), params.beta);
    }
  }

  Assignment best;
  double best_s = std::numeric_limits<double>::infinity();
  std::vector<Assignment> colony(static_cast<std::size_t>(params.ants), Assignment(tasks));
  std::vector<double> scores(colony.size());
  std::vector<double> weights(vehicles);

  for (int iter = 0; iter < params.iterations; ++iter) {
    for (std::size_t k = 0; k < colony.size(); ++k) {
      for (std::size_t t = 0; t < tasks; ++t) {
        double total = 0.0;
        for (std::size_t v = 0; v < vehicles; ++v) {
          weights[v] = std::pow(pheromone[t * vehicles + v], params.alpha) * desirability[t * vehicles + v];
          total += weights[v];
        }
        double r = unit(rng) * total;
        std::size_t pick = vehicles - 1;
        for (std::size_t v = 0; v < vehicles; ++v) {
          r -= weights[v];
          if (r < 0.0) {
            pick = v;
            break;
          }
        }
        colony[k][t] = pick;
      }
      scores[k] = scalar(evaluate(times, problem, colony[k]));
      if (scores[k] < best_s) {
        best_s = scores[k];
        best = colony[k];
      }
    }

    for (auto& tau : pheromone) tau *= 1.0 - params.evaporation;
    // Deposit 1/L with L = 1 + (score - best score), so the incumbent lays 1.
    for (std::size_t k = 0; k < colony.size(); ++k) {
      const double deposit = 1.0 / (1.0 + scores[k] - best_s);
      for (std::size_t t = 0; t < tasks; ++t) pheromone[t * vehicles + colony[k][t]] += deposit;
    }
  }
  return {best, evaluate(times, problem, best), best_s};
}

}  // namespace fabflow::scheduler
