#include "fabflow/robust_planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "fabflow/error.hpp"
#include "fabflow/simplex.hpp"

namespace fabflow::planner {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kProbeDirections = 64;
constexpr double kOuterStep = 1e-5;  // finite-difference step for ∇‖t‖

simplex::Domain search_domain(const PlannerLimits& limits, const WltpVector& nominal) {
  if (limits.neighborhood_radius) {
    return simplex::Domain::neighborhood(nominal.values(), *limits.neighborhood_radius, limits.eta);
  }
  return simplex::Domain::clipped(nominal.size(), limits.eta);
}

std::optional<double> try_wip(const RoutingModel& model, const WltpVector& p, const FleetConfig& c) {
  try {
    return queueing::total_wip(model, p, c);
  } catch (const Error& e) {
    if (e.code() == Errc::unstable_station || e.code() == Errc::zero_vehicles ||
        e.code() == Errc::non_open_network) {
      return std::nullopt;
    }
    throw;
  }
}

// ‖projected ∇W‖ at p, or nullopt where any probe is unstable.
struct Fluctuation {
  const RoutingModel& model;
  const FleetConfig& c;
  std::size_t evaluations = 0;

  std::optional<double> operator()(const std::vector<double>& p) {
    try {
      const auto g = queueing::wip_gradient(model, WltpVector(p), c);
      ++evaluations;
      return simplex::norm2(simplex::tangent_from_free(g));
    } catch (const Error& e) {
      if (e.code() == Errc::unstable_station || e.code() == Errc::zero_vehicles ||
          e.code() == Errc::non_open_network) {
        return std::nullopt;
      }
      throw;
    }
  }
};

struct Incumbent {
  std::vector<double> p;
  double value = -kInf;

  void offer(const std::vector<double>& q, double v) {
    if (v > value) {
      value = v;
      p = q;
    }
  }
};

std::optional<std::vector<double>> outer_gradient(Fluctuation& phi, const std::vector<double>& p) {
  const std::size_t n = p.size() - 1;
  std::vector<double> g(n);
  for (std::size_t i = 1; i <= n; ++i) {
    auto plus = p;
    auto minus = p;
    plus[i] += kOuterStep;
    plus[0] -= kOuterStep;
    minus[i] -= kOuterStep;
    minus[0] += kOuterStep;
    const auto fp = phi(plus);
    const auto fm = phi(minus);
    if (!fp || !fm) return std::nullopt;
    g[i - 1] = (*fp - *fm) / (2.0 * kOuterStep);
  }
  return g;
}

void ascend(Fluctuation& phi, const simplex::Domain& domain, std::vector<double> p, double value,
            int max_iterations, Incumbent& best) {
  double step = -1.0;
  for (int iter = 0; iter < max_iterations; ++iter) {
    const auto g = outer_gradient(phi, p);
    if (!g) return;
    const auto d = simplex::tangent_from_free(*g);
    const double d_norm = simplex::norm2(d);
    if (d_norm < 1e-14) return;
    if (step < 0.0) step = 0.1 / d_norm;

    bool moved = false;
    while (step * d_norm > 1e-13) {
      std::vector<double> trial(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) trial[i] = p[i] + step * d[i];
      trial = simplex::project(trial, domain);
      double decrease = 0.0;
      double displacement = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        decrease += d[i] * (trial[i] - p[i]);
        displacement = std::max(displacement, std::abs(trial[i] - p[i]));
      }
      if (displacement == 0.0) return;  // pinned at a vertex of the domain
      const auto f = phi(trial);
      if (f) best.offer(trial, *f);
      if (f && *f >= value + 1e-4 * decrease && *f > value) {
        p = std::move(trial);
        value = *f;
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return;
  }
}

// Pattern search along e_i - e_j, for coordinates pinned by the projection.
void polish(Fluctuation& phi, const simplex::Domain& domain, Incumbent& best) {
  const std::size_t dim = best.p.size();
  for (double delta = 1e-2; delta >= 1e-10; delta *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
          if (i == j) continue;
          auto trial = best.p;
          trial[i] += delta;
          trial[j] -= delta;
          trial = simplex::project(trial, domain);
          if (trial == best.p) continue;
          const auto f = phi(trial);
          if (f && *f > best.value) {
            best.offer(trial, *f);
            improved = true;
          }
        }
      }
    }
  }
}

}  // namespace

std::vector<std::string> limit_violations(const PlannerLimits& limits) {
  std::vector<std::string> issues;
  if (limits.c_max < 0) issues.emplace_back("limits.c_max must be >= 0");
  if (!(limits.w_star > 0.0)) issues.emplace_back("limits.w_star must be > 0");
  if (!(limits.u >= limits.w_star)) issues.emplace_back("limits.u must be >= limits.w_star");
  if (!(limits.delta_wip_max > 0.0)) issues.emplace_back("limits.delta_wip_max must be > 0");
  if (!(limits.epsilon > 0.0)) issues.emplace_back("limits.epsilon must be > 0");
  if (!(limits.eta > 0.0 && limits.eta < 0.5)) issues.emplace_back("limits.eta must lie in (0, 0.5)");
  if (limits.neighborhood_radius && !(*limits.neighborhood_radius > 0.0)) {
    issues.emplace_back("limits.neighborhood_radius must be > 0");
  }
  if (limits.mc_samples < 0) issues.emplace_back("limits.mc_samples must be >= 0");
  if (!(limits.dirichlet_alpha > 0.0)) issues.emplace_back("limits.dirichlet_alpha must be > 0");
  return issues;
}

WorstCase worst_case_direction(const RoutingModel& model, const FleetConfig& c,
                               const PlannerLimits& limits, const WltpVector& nominal,
                               const LowerLevelOptions& options) {
  const std::size_t dim = model.wltp_size();
  if (nominal.size() != dim) throw Error(Errc::invalid_wltp, "nominal WLTP has the wrong dimension");
  const auto domain = search_domain(limits, nominal);

  Fluctuation phi{model, c};
  Incumbent best;
  if (dim >= 2) {
    for (const auto& start : simplex::low_discrepancy_points(domain, static_cast<std::size_t>(options.starts))) {
      const auto f = phi(start);
      if (!f) continue;
      best.offer(start, *f);
      ascend(phi, domain, start, *f, options.max_iterations, best);
    }
    if (best.value == -kInf) {
      const auto start = simplex::project(nominal.values(), domain);
      if (const auto f = phi(start)) {
        best.offer(start, *f);
        ascend(phi, domain, start, *f, options.max_iterations, best);
      }
    }
  } else if (const auto f = phi(nominal.vector())) {
    best.offer(nominal.vector(), *f);
  }
  if (best.value == -kInf) {
    throw Error(Errc::no_stable_point,
                "no stable WLTP point found for fleet " + queueing::to_string(c));
  }
  if (dim >= 2) polish(phi, domain, best);

  WorstCase wc;
  wc.p_star = WltpVector(best.p);
  const auto g = queueing::wip_gradient(model, wc.p_star, c);
  auto t = simplex::tangent_from_free(g);
  wc.v_star = simplex::norm2(t);
  if (wc.v_star > 0.0) {
    for (auto& v : t) v /= wc.v_star;
    wc.x_star = std::move(t);
  } else {
    wc.x_star.assign(dim, 0.0);
  }
  wc.probes = phi.evaluations;
  return wc;
}

double delta_wip(const RoutingModel& model, const WltpVector& p, const FleetConfig& c,
                 double epsilon, double eta) {
  const double base = queueing::total_wip(model, p, c);
  if (epsilon == 0.0) return 0.0;
  const auto domain = simplex::Domain::clipped(p.size(), eta);
  double worst = 0.0;
  for (const auto& x : simplex::probe_directions(p.size(), kProbeDirections)) {
    std::vector<double> q(p.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = p[i] + epsilon * x[i];
    q = simplex::project(q, domain);
    worst = std::max(worst, std::abs(queueing::total_wip(model, WltpVector(std::move(q)), c) - base));
  }
  return worst;
}

bool ConstraintRecord::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.pass; });
}

const ConstraintCheck* ConstraintRecord::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ConstraintRecord check_constraints(const RoutingModel& model, const WltpVector& p_nominal,
                                   const FleetConfig& c, const PlannerLimits& limits,
                                   const WorstCase* worst_case) {
  ConstraintRecord record;

  const int total = c.total();
  record.checks.push_back({std::string(kFleetSize), total <= limits.c_max,
                           static_cast<double>(total), static_cast<double>(limits.c_max), {}});

  std::optional<double> nominal;
  std::string nominal_error;
  try {
    nominal = queueing::total_wip(model, p_nominal, c);
  } catch (const Error& e) {
    nominal_error = e.what();
  }
  record.checks.push_back({std::string(kNominalWip), nominal && *nominal <= limits.w_star,
                           nominal.value_or(kInf), limits.w_star, nominal_error});

  double sum = 0.0;
  for (double v : p_nominal.values()) sum += v;
  record.checks.push_back({std::string(kWltpSum), queueing::sums_to_one(p_nominal),
                           std::abs(sum - 1.0), queueing::kSimplexTolerance, {}});

  double margin = kInf;
  for (double v : p_nominal.values()) margin = std::min({margin, v, 1.0 - v});
  record.checks.push_back({std::string(kWltpBounds),
                           p_nominal.size() > 0 && queueing::strictly_inside_unit_interval(p_nominal),
                           margin, 0.0, "measured = min_i min(p_i, 1 - p_i); must be > 0"});

  ConstraintCheck fluct{std::string(kDeltaWip), false, kInf, limits.delta_wip_max, {}};
  ConstraintCheck cap{std::string(kWipCap), false, kInf, limits.u, {}};
  if (nominal) {
    try {
      fluct.measured = delta_wip(model, p_nominal, c, limits.epsilon, limits.eta);
      fluct.pass = fluct.measured <= limits.delta_wip_max;
    } catch (const Error& e) {
      fluct.note = e.what();
    }

    // Largest WIP over the probed points.
    double peak = *nominal;
    bool stable = true;
    const auto domain = simplex::Domain::clipped(p_nominal.size(), limits.eta);
    std::vector<WltpVector> probes;
    if (p_nominal.size() >= 2 && limits.epsilon > 0.0) {
      for (const auto& x : simplex::probe_directions(p_nominal.size(), kProbeDirections)) {
        std::vector<double> q(p_nominal.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = p_nominal[i] + limits.epsilon * x[i];
        probes.emplace_back(simplex::project(q, domain));
      }
    }
    if (worst_case) probes.push_back(worst_case->p_star);
    for (const auto& q : probes) {
      const auto w = try_wip(model, q, c);
      if (!w) {
        stable = false;
        break;
      }
      peak = std::max(peak, *w);
    }
    cap.measured = stable ? peak : kInf;
    cap.pass = stable && peak <= limits.u;
    cap.note = worst_case ? "nominal, epsilon-ball probes and worst-case point"
                          : "nominal and epsilon-ball probes";
    if (!stable) cap.note = "a probed point is unstable";
  } else {
    fluct.note = cap.note = "nominal point not evaluable: " + nominal_error;
  }
  record.checks.push_back(std::move(fluct));
  record.checks.push_back(std::move(cap));
  return record;
}

std::uint64_t count_candidates(const FleetCandidates& candidates, int c_max) {
  if (candidates.min_counts.size() != candidates.max_counts.size() || c_max < 0) return 0;
  // ways[s] = number of partial vectors with sum s.
  std::vector<std::uint64_t> ways(static_cast<std::size_t>(c_max) + 1, 0);
  ways[0] = 1;
  for (std::size_t t = 0; t < candidates.min_counts.size(); ++t) {
    const int lo = std::max(0, candidates.min_counts[t]);
    const int hi = std::min(candidates.max_counts[t], c_max);
    std::vector<std::uint64_t> next(ways.size(), 0);
    for (int s = 0; s <= c_max; ++s) {
      if (!ways[static_cast<std::size_t>(s)]) continue;
      for (int k = lo; k <= hi && s + k <= c_max; ++k) {
        next[static_cast<std::size_t>(s + k)] =
            std::min<std::uint64_t>(next[static_cast<std::size_t>(s + k)] + ways[static_cast<std::size_t>(s)],
                                    std::numeric_limits<std::uint64_t>::max() / 2);
      }
    }
    ways = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto w : ways) total = std::min<std::uint64_t>(total + w, std::numeric_limits<std::uint64_t>::max() / 2);
  return total;
}

std::vector<FleetConfig> enumerate_candidates(const FleetCandidates& candidates, int c_max) {
  std::vector<FleetConfig> out;
  const std::size_t types = candidates.min_counts.size();
  if (types == 0 || types != candidates.max_counts.size()) return out;
  std::vector<int> counts(types);
  std::function<void(std::size_t, int)> rec = [&](std::size_t t, int used) {
    if (t == types) {
      out.push_back(FleetConfig{counts});
      return;
    }
    const int lo = std::max(0, candidates.min_counts[t]);
    const int hi = std::min(candidates.max_counts[t], c_max - used);
    for (int k = lo; k <= hi; ++k) {
      counts[t] = k;
      rec(t + 1, used + k);
    }
  };
  rec(0, 0);
  return out;
}

std::string_view to_string(SearchMode mode) {
  return mode == SearchMode::exhaustive ? "exhaustive" : "coordinate_descent";
}

CandidateOutcome evaluate_candidate(const RoutingModel& model, const WltpVector& p_nominal,
                                    const FleetConfig& c, const PlannerLimits& limits,
                                    const LowerLevelOptions& options) {
  CandidateOutcome out;
  out.config = c;
  out.nominal_wip = try_wip(model, p_nominal, c);
  if (out.nominal_wip) {
    try {
      out.worst_case = worst_case_direction(model, c, limits, p_nominal, options);
    } catch (const Error& e) {
      out.reason = e.what();
    }
  }
  out.constraints = check_constraints(model, p_nominal, c, limits,
                                      out.worst_case ? &*out.worst_case : nullptr);
  if (!out.worst_case && out.reason.empty()) {
    const auto* nominal_check = out.constraints.find(kNominalWip);
    out.reason = nominal_check && !nominal_check->note.empty() ? nominal_check->note : "nominal point not evaluable";
  }
  if (out.worst_case) {
    for (const auto& check : out.constraints.checks) {
      if (!check.pass) {
        if (!out.reason.empty()) out.reason += "; ";
        out.reason += check.name + " failed";
      }
    }
  }
  out.feasible = out.worst_case.has_value() && out.constraints.all_pass();
  return out;
}

bool better_candidate(double v_a, const FleetConfig& a, double v_b, const FleetConfig& b) {
  if (v_a != v_b) return v_a < v_b;
  if (a.total() != b.total()) return a.total() < b.total();
  return a.counts < b.counts;
}

PlanResult plan_fleet(const RoutingModel& model, const WltpVector& p_nominal,
                      const FleetCandidates& candidates, const PlannerLimits& limits,
                      const LowerLevelOptions& options) {
  if (candidates.min_counts.empty() ||
      candidates.min_counts.size() != candidates.max_counts.size()) {
    throw Error(Errc::invalid_argument, "fleet candidate bounds are empty or inconsistent");
  }
  PlanResult result;
  const CandidateOutcome* best = nullptr;
  auto consider = [&](const CandidateOutcome& o) {
    if (!o.feasible) return;
    if (!best || better_candidate(o.worst_case->v_star, o.config, best->worst_case->v_star, best->config)) {
      best = &o;
    }
  };

  const auto count = count_candidates(candidates, limits.c_max);
  if (count <= kExhaustiveLimit) {
    result.mode = SearchMode::exhaustive;
    for (const auto& c : enumerate_candidates(candidates, limits.c_max)) {
      result.examined.push_back(evaluate_candidate(model, p_nominal, c, limits, options));
    }
    for (const auto& o : result.examined) consider(o);
  } else {
    result.mode = SearchMode::coordinate_descent;
    result.examined.reserve(4096);
    auto evaluate = [&](const FleetConfig& c) -> const CandidateOutcome& {
      for (const auto& o : result.examined) {
        if (o.config == c) return o;
      }
      result.examined.push_back(evaluate_candidate(model, p_nominal, c, limits, options));
      return result.examined.back();
    };
    // Start from the largest configuration that fits the budget.
    FleetConfig current{std::vector<int>(candidates.min_counts.size())};
    int budget = limits.c_max;
    for (std::size_t t = 0; t < current.counts.size(); ++t) {
      current.counts[t] = std::max(0, candidates.min_counts[t]);
      budget -= current.counts[t];
    }
    for (std::size_t t = 0; t < current.counts.size() && budget > 0; ++t) {
      const int add = std::min(budget, candidates.max_counts[t] - current.counts[t]);
      current.counts[t] += std::max(0, add);
      budget -= std::max(0, add);
    }
    std::optional<std::size_t> current_index;
    {
      const auto& o = evaluate(current);
      current_index = static_cast<std::size_t>(&o - result.examined.data());
    }
    while (true) {
      std::optional<std::size_t> next;
      for (std::size_t t = 0; t < current.counts.size(); ++t) {
        for (int step : {-1, +1}) {
          FleetConfig n = current;
          n.counts[t] += step;
          if (n.counts[t] < std::max(0, candidates.min_counts[t]) ||
              n.counts[t] > candidates.max_counts[t] || n.total() > limits.c_max) {
            continue;
          }
          const auto& o = evaluate(n);
          const auto idx = static_cast<std::size_t>(&o - result.examined.data());
          if (!o.feasible) continue;
          const auto& ref = next ? result.examined[*next] : result.examined[*current_index];
          if (!ref.feasible ||
              better_candidate(o.worst_case->v_star, o.config, ref.worst_case->v_star, ref.config)) {
            next = idx;
          }
        }
      }
      if (!next) break;
      current_index = next;
      current = result.examined[*next].config;
    }
    for (const auto& o : result.examined) consider(o);
  }

  if (!best) {
    throw Error(Errc::no_feasible_fleet, "none of the " + std::to_string(result.examined.size()) +
                                             " examined fleet configurations satisfies the constraints");
  }
  result.c_star = best->config;
  result.worst_case = *best->worst_case;
  result.feasibility = best->constraints;
  result.nominal_wip = best->nominal_wip.value_or(0.0);
  if (limits.mc_samples > 0) {
    result.exceedance_frequency = exceedance_frequency(model, p_nominal, result.c_star, limits.u,
                                                       limits.dirichlet_alpha, limits.mc_samples,
                                                       limits.mc_seed);
  }
  return result;
}

double exceedance_frequency(const RoutingModel& model, const WltpVector& p_nominal,
                            const FleetConfig& c, double threshold, double alpha, int samples,
                            std::uint64_t seed) {
  if (samples <= 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::vector<std::gamma_distribution<double>> shapes;
  for (double p : p_nominal.values()) shapes.emplace_back(alpha * p, 1.0);
  int exceed = 0;
  for (int s = 0; s < samples; ++s) {
    std::vector<double> q(p_nominal.size());
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] = shapes[i](rng);
      total += q[i];
    }
    for (auto& v : q) v /= total;
    const auto w = try_wip(model, WltpVector(std::move(q)), c);
    if (!w || *w > threshold) ++exceed;
  }
  return static_cast<double>(exceed) / samples;
}

}  // namespace fabflow::planner
