#include "fabflow/error.hpp"

#include <cstdio>

namespace fabflow {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::duplicate_node: return "duplicate_node";
    case Errc::dangling_edge: return "dangling_edge";
    case Errc::invalid_edge: return "invalid_edge";
    case Errc::no_origin_or_destination: return "no_origin_or_destination";
    case Errc::infeasible_demand: return "infeasible_demand";
    case Errc::non_open_network: return "non_open_network";
    case Errc::invalid_routing: return "invalid_routing";
    case Errc::unstable_station: return "unstable_station";
    case Errc::zero_vehicles: return "zero_vehicles";
    case Errc::invalid_direction: return "invalid_direction";
    case Errc::invalid_wltp: return "invalid_wltp";
    case Errc::no_stable_point: return "no_stable_point";
    case Errc::no_feasible_fleet: return "no_feasible_fleet";
    case Errc::missing_distance: return "missing_distance";
    case Errc::overloaded_vehicle_round: return "overloaded_vehicle_round";
    case Errc::invalid_schedule: return "invalid_schedule";
    case Errc::empty_seeds: return "empty_seeds";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::parse_error: return "parse_error";
    case Errc::schema_version_unsupported: return "schema_version_unsupported";
    case Errc::validation_errors: return "validation_errors";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

bool is_infeasibility(Errc code) {
  switch (code) {
    case Errc::infeasible_demand:
    case Errc::unstable_station:
    case Errc::zero_vehicles:
    case Errc::no_stable_point:
    case Errc::no_feasible_fleet:
    case Errc::non_open_network:
      return true;
    default:
      return false;
  }
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

namespace {

std::string unstable_message(const std::string& id, double rho) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", rho);
  return "station '" + id + "' is unstable (utilization " + buf + ")";
}

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out = "scenario validation failed:";
  for (const auto& issue : issues) {
    out += "\n  - ";
    out += issue;
  }
  return out;
}

}  // namespace

UnstableStationError::UnstableStationError(std::string station_id, double utilization)
    : Error(Errc::unstable_station, unstable_message(station_id, utilization)),
      station_id_(std::move(station_id)),
      utilization_(utilization) {}

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error(Errc::validation_errors, join_issues(issues)), issues_(std::move(issues)) {}

}  // namespace fabflow
