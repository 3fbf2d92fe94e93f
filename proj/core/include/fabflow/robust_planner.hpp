#pragma once

// Two-level robust fleet planning under WLTP uncertainty.
//
// Lower level: for a fixed fleet c, find the WLTP point p* and unit simplex
// direction x* maximising the directional derivative V(p, x | c) of WIP.
// Upper level: choose the fleet that minimises V* subject to the fleet-size,
// WIP-level, WLTP-validity, fluctuation and hard-cap constraints.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fabflow/queueing.hpp"

namespace fabflow::planner {

using queueing::FleetConfig;
using queueing::RoutingModel;
using queueing::WltpVector;

struct PlannerLimits {
  int c_max = 1;               // Σ vehicles ≤ c_max
  double w_star = 1.0;         // nominal WIP ≤ w_star
  double u = 1.0;              // WIP over every probed p ≤ u
  double delta_wip_max = 1.0;  // ε-ball WIP fluctuation ≤ delta_wip_max
  double epsilon = 0.01;       // radius of the fluctuation ball
  double eta = 1e-3;           // simplex clipping: eta ≤ p_i ≤ 1 - eta
  /// Restricts the lower level to |p - p_nominal|∞ ≤ radius when set.
  std::optional<double> neighborhood_radius;
  /// Dirichlet(alpha · p_nominal) exceedance estimate; disabled when 0.
  int mc_samples = 0;
  double dirichlet_alpha = 100.0;
  std::uint64_t mc_seed = 42;

  friend bool operator==(const PlannerLimits&, const PlannerLimits&) = default;
};

/// Problems with the limits themselves (empty when valid).
std::vector<std::string> limit_violations(const PlannerLimits& limits);

struct LowerLevelOptions {
  int starts = 16;
  int max_iterations = 500;
};

struct WorstCase {
  WltpVector p_star;
  std::vector<double> x_star;  // unit, Σ = 0; zero when v_star = 0
  double v_star = 0.0;
  std::size_t probes = 0;      // stable points evaluated during the search
};

/// Throws Error{no_stable_point} if neither the search nor `nominal` yields a stable point.
WorstCase worst_case_direction(const RoutingModel& model, const FleetConfig& c,
                               const PlannerLimits& limits, const WltpVector& nominal,
                               const LowerLevelOptions& options = {});

/// max over 64 deterministic unit directions x (Σx = 0) of
/// |W(p + εx) - W(p)|, probes projected back onto the clipped simplex.
double delta_wip(const RoutingModel& model, const WltpVector& p, const FleetConfig& c,
                 double epsilon, double eta = 1e-3);

struct ConstraintCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string note;
};

struct ConstraintRecord {
  std::vector<ConstraintCheck> checks;

  bool all_pass() const;
  const ConstraintCheck* find(std::string_view name) const;
};

inline constexpr std::string_view kFleetSize = "fleet_size";
inline constexpr std::string_view kNominalWip = "nominal_wip";
inline constexpr std::string_view kWltpSum = "wltp_sum";
inline constexpr std::string_view kWltpBounds = "wltp_bounds";
inline constexpr std::string_view kDeltaWip = "delta_wip";
inline constexpr std::string_view kWipCap = "wip_cap";

/// Evaluates every constraint independently; infeasibility is reported, not
/// thrown. The hard-cap check takes the largest WIP over p_nominal, its
/// ε-ball probes and, when given, the worst-case point.
ConstraintRecord check_constraints(const RoutingModel& model, const WltpVector& p_nominal,
                                   const FleetConfig& c, const PlannerLimits& limits,
                                   const WorstCase* worst_case = nullptr);

/// Per-type inclusive bounds on the vehicle count.
struct FleetCandidates {
  std::vector<int> min_counts;
  std::vector<int> max_counts;

  friend bool operator==(const FleetCandidates&, const FleetCandidates&) = default;
};

/// Number of integer vectors inside the bounds with Σ ≤ c_max.
std::uint64_t count_candidates(const FleetCandidates& candidates, int c_max);
/// Those vectors in lexicographic order.
std::vector<FleetConfig> enumerate_candidates(const FleetCandidates& candidates, int c_max);

inline constexpr std::uint64_t kExhaustiveLimit = 100'000;

enum class SearchMode { exhaustive, coordinate_descent };
std::string_view to_string(SearchMode mode);

struct CandidateOutcome {
  FleetConfig config;
  bool feasible = false;
  std::optional<WorstCase> worst_case;
  std::optional<double> nominal_wip;
  ConstraintRecord constraints;
  std::string reason;  // why the candidate was rejected
};

struct PlanResult {
  FleetConfig c_star;
  WorstCase worst_case;
  ConstraintRecord feasibility;
  double nominal_wip = 0.0;
  SearchMode mode = SearchMode::exhaustive;
  std::vector<CandidateOutcome> examined;
  std::optional<double> exceedance_frequency;
};

/// Fully evaluates one candidate fleet.
CandidateOutcome evaluate_candidate(const RoutingModel& model, const WltpVector& p_nominal,
                                    const FleetConfig& c, const PlannerLimits& limits,
                                    const LowerLevelOptions& options = {});

/// True when `a` should be preferred over `b`: smaller v_star, then fewer
/// vehicles, then lexicographically smaller counts.
bool better_candidate(double v_a, const FleetConfig& a, double v_b, const FleetConfig& b);

/// Throws Error{no_feasible_fleet} if no examined candidate is feasible.
PlanResult plan_fleet(const RoutingModel& model, const WltpVector& p_nominal,
                      const FleetCandidates& candidates, const PlannerLimits& limits,
                      const LowerLevelOptions& options = {});

/// Fraction of Dirichlet(alpha · p_nominal) samples whose WIP exceeds
/// `threshold` (unstable samples count as exceedances).
double exceedance_frequency(const RoutingModel& model, const WltpVector& p_nominal,
                            const FleetConfig& c, double threshold, double alpha, int samples,
                            std::uint64_t seed);

}  // namespace fabflow::planner
