#pragma once

// Open queueing-network evaluator for the AMHS: traffic equations, M/M/1
// work-in-process, and its sensitivity to the wafer-lot transfer
// probabilities (WLTP).

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fabflow::queueing {

/// Stability margin: a station must satisfy ρ ≤ 1 - kStabilityMargin.
inline constexpr double kStabilityMargin = 1e-6;
/// Central finite-difference step used by wip_gradient.
inline constexpr double kGradientStep = 1e-6;
/// Tolerance on Σp = 1.
inline constexpr double kSimplexTolerance = 1e-12;

/// Lot-transfer probabilities p_0 … p_n. The container does not enforce
/// the simplex constraints; see wltp_violations().
class WltpVector {
 public:
  WltpVector() = default;
  explicit WltpVector(std::vector<double> p) : p_(std::move(p)) {}

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }
  const std::vector<double>& vector() const { return p_; }

  friend bool operator==(const WltpVector&, const WltpVector&) = default;

 private:
  std::vector<double> p_;
};

/// Human-readable violations of Σp = 1 and 0 < p_i < 1. Empty when p is a
/// valid WLTP vector.
std::vector<std::string> wltp_violations(const WltpVector& p);
bool sums_to_one(const WltpVector& p);
bool strictly_inside_unit_interval(const WltpVector& p);

enum class StationKind { process, transport };

struct StationProfile {
  std::string id;
  StationKind kind = StationKind::process;
  /// Lots/hour. For transport stations this is the rate of one vehicle.
  double mu_base = 1.0;
  /// External arrivals, lots/hour.
  double gamma = 0.0;
  /// Vehicle type serving a transport station; ignored for process stations.
  std::size_t vehicle_type = 0;

  friend bool operator==(const StationProfile&, const StationProfile&) = default;
};

/// Reference to the i-th WLTP component.
struct WltpRef {
  std::size_t index = 0;
  friend bool operator==(const WltpRef&, const WltpRef&) = default;
};

/// One routing-matrix cell: a constant probability or a WLTP component.
struct RoutingBinding {
  std::size_t from = 0;
  std::size_t to = 0;
  std::variant<double, WltpRef> value;

  friend bool operator==(const RoutingBinding&, const RoutingBinding&) = default;
};

/// Stations plus the binding from p to the routing matrix R(p), where
/// R[i][j] is the probability that a lot leaving station i visits j next.
class RoutingModel {
 public:
  /// Throws Error{invalid_routing} on out-of-range references, duplicate
  /// cells, constants outside [0, 1], or non-positive service rates.
  RoutingModel(std::vector<StationProfile> stations, std::vector<RoutingBinding> bindings,
               std::size_t wltp_size);

  const std::vector<StationProfile>& stations() const { return stations_; }
  const std::vector<RoutingBinding>& bindings() const { return bindings_; }
  std::size_t station_count() const { return stations_.size(); }
  std::size_t wltp_size() const { return wltp_size_; }
  /// Number of vehicle types referenced by transport stations.
  std::size_t vehicle_type_count() const;

  /// Row-major station_count² matrix. Throws Error{invalid_routing} if a
  /// row sum exceeds 1 or an entry is negative.
  std::vector<double> matrix(const WltpVector& p) const;

  friend bool operator==(const RoutingModel&, const RoutingModel&) = default;

 private:
  std::vector<StationProfile> stations_;
  std::vector<RoutingBinding> bindings_;
  std::size_t wltp_size_;
};

/// Vehicles per type (the decision variable of the fleet planner).
struct FleetConfig {
  std::vector<int> counts;

  int total() const;
  friend auto operator<=>(const FleetConfig&, const FleetConfig&) = default;
};

std::string to_string(const FleetConfig& c);

struct WipReport {
  std::vector<double> arrival_rates;
  std::vector<double> service_rates;
  std::vector<double> utilizations;
  std::vector<double> per_station_wip;
  double total_wip = 0.0;
};

/// Solves λ = γ + R(p)ᵀλ. Throws Error{non_open_network} when the spectral
/// radius of R(p) is not below one or the residual exceeds 1e-10.
std::vector<double> traffic_equations(const RoutingModel& model, const WltpVector& p);

/// M/M/1 WIP at every station. Transport stations pool their vehicles into
/// one server of rate mu_base · count. Throws UnstableStationError when
/// ρ > 1 - kStabilityMargin and Error{zero_vehicles} when a loaded transport
/// station has no vehicles.
WipReport wip(const RoutingModel& model, const WltpVector& p, const FleetConfig& c);

double total_wip(const RoutingModel& model, const WltpVector& p, const FleetConfig& c);

/// ∂W/∂p_i for i = 1…n along e_i - e_0 (p_0 dependent), by central
/// differences with step kGradientStep.
std::vector<double> wip_gradient(const RoutingModel& model, const WltpVector& p,
                                 const FleetConfig& c);

/// V(p, x | c) = ∇W · x for a direction x ∈ R^{n+1} with Σx = 0. Throws
/// Error{invalid_direction} otherwise.
double directional_derivative(const RoutingModel& model, const WltpVector& p,
                              std::span<const double> x, const FleetConfig& c);

/// Same as above with a precomputed free-coordinate gradient.
double directional_derivative(std::span<const double> free_gradient, std::span<const double> x);

// --- monotonicity verification -------------------------------------------

struct ClaimResult {
  /// "positive_gradient", "decreasing_in_p0" or "increasing_in_pi".
  std::string claim;
  /// Which ∂W/∂p_i the claim concerns (1-based WLTP index).
  std::size_t component = 0;
  /// Label of the grid line (or grid point for positivity).
  std::string grid_line;
  bool pass = true;
  /// Offending points, formatted "(p0;p1;...)->(p0;p1;...)"; empty when passing.
  std::string violating_points;
};

struct MonotonicityReport {
  std::vector<ClaimResult> results;

  bool all_pass(std::string_view claim) const;
  std::size_t count(std::string_view claim) const;
  std::optional<ClaimResult> first_violation(std::string_view claim) const;
};

/// Checks, for every i ≥ 1, that ∂W/∂p_i > 0 at each grid point, is
/// non-increasing along grid lines where p_0 increases (p_i held fixed),
/// and non-decreasing along grid lines where p_i increases. Grid lines are
/// recovered from the points: a line is a set of points that differ only in
/// one free coordinate. Violations are reported, not thrown.
MonotonicityReport check_monotonicity(const RoutingModel& model, std::span<const WltpVector> grid,
                                      const FleetConfig& c);

/// Tensor grid in the free coordinates p_1…p_n: each takes `count` evenly
/// spaced values in [lo, hi]; p_0 = 1 - Σ. Points outside the simplex are dropped.
std::vector<WltpVector> box_grid(std::size_t wltp_size, double lo, double hi, std::size_t count);

}  // namespace fabflow::queueing
