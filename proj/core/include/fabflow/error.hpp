#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fabflow {

enum class Errc {
  duplicate_node,
  dangling_edge,
  invalid_edge,
  no_origin_or_destination,
  infeasible_demand,
  non_open_network,
  invalid_routing,
  unstable_station,
  zero_vehicles,
  invalid_direction,
  invalid_wltp,
  no_stable_point,
  no_feasible_fleet,
  missing_distance,
  overloaded_vehicle_round,
  invalid_schedule,
  empty_seeds,
  invalid_argument,
  parse_error,
  schema_version_unsupported,
  validation_errors,
  io_error,
};

/// snake_case identifier used in machine-readable summaries (`error=<name>`).
std::string_view to_string(Errc code);

/// True for errors that describe a model that has no admissible answer
/// (as opposed to malformed input).
bool is_infeasibility(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class UnstableStationError : public Error {
 public:
  UnstableStationError(std::string station_id, double utilization);

  const std::string& station_id() const noexcept { return station_id_; }
  double utilization() const noexcept { return utilization_; }

 private:
  std::string station_id_;
  double utilization_;
};

/// Carries every problem found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues);

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

}  // namespace fabflow
