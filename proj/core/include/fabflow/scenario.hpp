#pragma once

// Versioned scenario files: every input of the flow, queueing, planning and
// scheduling stages in one JSON document.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fabflow/netflow.hpp"
#include "fabflow/queueing.hpp"
#include "fabflow/robust_planner.hpp"
#include "fabflow/scheduler.hpp"

namespace fabflow::scenario {

inline constexpr int kSchemaVersion = 1;

/// Tensor grid over the free WLTP coordinates for monotonicity checks.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct QueueingSection {
  std::vector<queueing::StationProfile> stations;
  /// Station indices; WltpRef indices point into nominal_p.
  std::vector<queueing::RoutingBinding> routing;
  queueing::WltpVector nominal_p;
  std::optional<GridSpec> grid;

  queueing::RoutingModel model() const;
  /// box_grid over `grid`; empty when no grid is declared.
  std::vector<queueing::WltpVector> grid_points() const;

  friend bool operator==(const QueueingSection&, const QueueingSection&) = default;
};

struct FleetSection {
  std::vector<std::string> types;
  std::vector<int> min_counts;
  std::vector<int> max_counts;
  /// Fleet used by the single-fleet stages (wip, worstcase).
  std::vector<int> nominal;

  planner::FleetCandidates candidates() const { return {min_counts, max_counts}; }
  queueing::FleetConfig nominal_config() const { return {nominal}; }

  friend bool operator==(const FleetSection&, const FleetSection&) = default;
};

struct SchedulingSection {
  std::vector<scheduler::TransportTask> tasks;
  std::vector<scheduler::VehicleSpec> vehicles;
  scheduler::DistanceTable distances;
  scheduler::ProductivityMode productivity = scheduler::ProductivityMode::per_makespan;
  /// Vehicle that receives every task in the unoptimized dispatch.
  std::string baseline_vehicle;

  scheduler::SchedulingProblem problem() const;
  std::size_t baseline_index() const;

  friend bool operator==(const SchedulingSection&, const SchedulingSection&) = default;
};

/// A published improvement figure carried as data. Gated entries are
/// checked by the acceptance suite; the others are only reported.
struct ExpectedImprovement {
  std::string id;
  std::string metric;
  double percent = 0.0;
  bool gated = false;
  /// Pass threshold used by the acceptance suite when gated.
  double gate_percent = 0.0;
  std::string note;

  friend bool operator==(const ExpectedImprovement&, const ExpectedImprovement&) = default;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string description;
  netflow::NetworkSpec network;
  /// Demand for the min-cost stage; the max-flow value when unset.
  std::optional<netflow::Kilograms> demand_kg;
  std::optional<QueueingSection> queueing;
  std::optional<FleetSection> fleet;
  planner::PlannerLimits limits;
  std::optional<SchedulingSection> scheduling;
  scheduler::MetaheuristicParams metaheuristics;
  std::vector<ExpectedImprovement> expected_improvements;

  bool has_network() const { return !network.nodes.empty(); }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses and validates. Throws Error{parse_error},
/// Error{schema_version_unsupported} or ValidationError listing every issue.
Scenario parse_scenario(std::string_view json_text);

/// parse_scenario on a file's contents; Error{io_error} if unreadable.
Scenario load_scenario(const std::filesystem::path& path);

/// Every semantic issue (empty when valid).
std::vector<std::string> validate(const Scenario& scenario);

/// Pretty-printed JSON with sorted keys; parse_scenario(to_json(s)) == s.
std::string to_json(const Scenario& scenario);

/// Throws Error{io_error}.
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// SHA-256 (hex) of the compact canonical JSON, excluding the free-text
/// description.
std::string inputs_digest(const Scenario& scenario);

std::string sha256_hex(std::string_view bytes);

/// Keys accepted by apply_override, e.g. "limits.c_max".
const std::vector<std::string>& override_keys();

/// Sets one documented field from `key=value` text (value parsed as JSON,
/// else taken as a string) and revalidates. Throws ValidationError.
Scenario apply_override(const Scenario& scenario, std::string_view key, std::string_view value);

}  // namespace fabflow::scenario
