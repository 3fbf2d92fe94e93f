#include "fabflow/queueing.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "fabflow/error.hpp"
#include "fabflow/simplex.hpp"

namespace fabflow::queueing {

namespace {

constexpr double kResidualTolerance = 1e-10;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool sums_to_one(const WltpVector& p) {
  double s = 0.0;
  for (double v : p.values()) s += v;
  return std::abs(s - 1.0) <= kSimplexTolerance;
}

bool strictly_inside_unit_interval(const WltpVector& p) {
  return std::all_of(p.values().begin(), p.values().end(),
                     [](double v) { return v > 0.0 && v < 1.0; });
}

std::vector<std::string> wltp_violations(const WltpVector& p) {
  std::vector<std::string> issues;
  if (p.size() == 0) {
    issues.emplace_back("WLTP vector is empty");
    return issues;
  }
  if (!sums_to_one(p)) {
    double s = 0.0;
    for (double v : p.values()) s += v;
    issues.push_back("wltp_sum: components sum to " + fmt(s) + ", expected 1");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0 && p[i] < 1.0)) {
      issues.push_back("wltp_bounds: p_" + std::to_string(i) + " = " + fmt(p[i]) +
                       " is outside the open interval (0, 1)");
    }
  }
  return issues;
}

RoutingModel::RoutingModel(std::vector<StationProfile> stations,
                           std::vector<RoutingBinding> bindings, std::size_t wltp_size)
    : stations_(std::move(stations)), bindings_(std::move(bindings)), wltp_size_(wltp_size) {
  if (stations_.empty()) throw Error(Errc::invalid_routing, "routing model has no stations");
  for (const auto& s : stations_) {
    if (!(s.mu_base > 0.0) || !std::isfinite(s.mu_base)) {
      throw Error(Errc::invalid_routing, "station '" + s.id + "' needs mu_base > 0");
    }
    if (!(s.gamma >= 0.0) || !std::isfinite(s.gamma)) {
      throw Error(Errc::invalid_routing, "station '" + s.id + "' needs gamma >= 0");
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> cells;
  for (const auto& b : bindings_) {
    if (b.from >= stations_.size() || b.to >= stations_.size()) {
      throw Error(Errc::invalid_routing, "routing binding references an unknown station");
    }
    if (!cells.emplace(b.from, b.to).second) {
      throw Error(Errc::invalid_routing, "routing cell " + stations_[b.from].id + "->" +
                                             stations_[b.to].id + " bound twice");
    }
    if (const auto* c = std::get_if<double>(&b.value)) {
      if (!(*c >= 0.0 && *c <= 1.0)) {
        throw Error(Errc::invalid_routing, "routing constant outside [0, 1]");
      }
    } else if (std::get<WltpRef>(b.value).index >= wltp_size_) {
      throw Error(Errc::invalid_routing, "routing binding references p_" +
                                             std::to_string(std::get<WltpRef>(b.value).index) +
                                             " beyond the WLTP dimension");
    }
  }
}

std::size_t RoutingModel::vehicle_type_count() const {
  std::size_t n = 0;
  for (const auto& s : stations_) {
    if (s.kind == StationKind::transport) n = std::max(n, s.vehicle_type + 1);
  }
  return n;
}

std::vector<double> RoutingModel::matrix(const WltpVector& p) const {
  if (p.size() != wltp_size_) {
    throw Error(Errc::invalid_wltp, "WLTP vector has " + std::to_string(p.size()) +
                                        " components, model expects " + std::to_string(wltp_size_));
  }
  const std::size_t n = stations_.size();
  std::vector<double> r(n * n, 0.0);
  for (const auto& b : bindings_) {
    const double v = std::holds_alternative<double>(b.value)
                         ? std::get<double>(b.value)
                         : p[std::get<WltpRef>(b.value).index];
    if (v < 0.0) throw Error(Errc::invalid_routing, "negative routing probability");
    r[b.from * n + b.to] = v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += r[i * n + j];
    if (row > 1.0 + 1e-12) {
      throw Error(Errc::invalid_routing,
                  "routing row for station '" + stations_[i].id + "' sums to " + fmt(row));
    }
  }
  return r;
}

int FleetConfig::total() const {
  int t = 0;
  for (int c : counts) t += c;
  return t;
}

std::string to_string(const FleetConfig& c) {
  std::string out;
  for (std::size_t i = 0; i < c.counts.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(c.counts[i]);
  }
  return out;
}

std::vector<double> traffic_equations(const RoutingModel& model, const WltpVector& p) {
  const auto n = static_cast<Eigen::Index>(model.station_count());
  const auto r = model.matrix(p);
  Eigen::MatrixXd R(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) R(i, j) = r[static_cast<std::size_t>(i * n + j)];
  }
  const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(R, false).eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius < 1.0 - 1e-12)) {
    throw Error(Errc::non_open_network,
                "routing matrix has spectral radius " + fmt(radius) + "; lots never leave the network");
  }

  Eigen::VectorXd gamma(n);
  for (Eigen::Index i = 0; i < n; ++i) gamma(i) = model.stations()[static_cast<std::size_t>(i)].gamma;
  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - R.transpose();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd lambda = lu.solve(gamma);
  lambda += lu.solve(gamma - A * lambda);  // one refinement step

  const double residual = (gamma - A * lambda).cwiseAbs().maxCoeff();
  if (!(residual <= kResidualTolerance)) {
    throw Error(Errc::non_open_network, "traffic equations residual " + fmt(residual));
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::max(0.0, lambda(i));
  return out;
}

WipReport wip(const RoutingModel& model, const WltpVector& p, const FleetConfig& c) {
  WipReport report;
  report.arrival_rates = traffic_equations(model, p);
  const auto n = model.station_count();
  report.service_rates.resize(n);
  report.utilizations.resize(n);
  report.per_station_wip.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = model.stations()[i];
    const double lambda = report.arrival_rates[i];
    double mu = s.mu_base;
    if (s.kind == StationKind::transport) {
      if (s.vehicle_type >= c.counts.size()) {
        throw Error(Errc::invalid_argument, "fleet has no count for vehicle type " +
                                                std::to_string(s.vehicle_type) + " used by '" +
                                                s.id + "'");
      }
      const int vehicles = c.counts[s.vehicle_type];
      if (vehicles < 0) throw Error(Errc::invalid_argument, "negative vehicle count");
      if (vehicles == 0) {
        if (lambda > 0.0) {
          throw Error(Errc::zero_vehicles,
                      "transport station '" + s.id + "' has load but no vehicles of type " +
                          std::to_string(s.vehicle_type));
        }
        report.service_rates[i] = 0.0;
        continue;
      }
      mu = s.mu_base * vehicles;
    }
    const double rho = lambda / mu;
    if (rho > 1.0 - kStabilityMargin) throw UnstableStationError(s.id, rho);
    report.service_rates[i] = mu;
    report.utilizations[i] = rho;
    report.per_station_wip[i] = rho / (1.0 - rho);
  }
  for (double w : report.per_station_wip) report.total_wip += w;
  return report;
}

double total_wip(const RoutingModel& model, const WltpVector& p, const FleetConfig& c) {
  return wip(model, p, c).total_wip;
}

std::vector<double> wip_gradient(const RoutingModel& model, const WltpVector& p,
                                 const FleetConfig& c) {
  const std::size_t n = p.size();
  if (n < 2) return {};
  std::vector<double> g(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<double> plus = p.vector();
    std::vector<double> minus = p.vector();
    plus[i] += kGradientStep;
    plus[0] -= kGradientStep;
    minus[i] -= kGradientStep;
    minus[0] += kGradientStep;
    const double w_plus = total_wip(model, WltpVector(std::move(plus)), c);
    const double w_minus = total_wip(model, WltpVector(std::move(minus)), c);
    g[i - 1] = (w_plus - w_minus) / (2.0 * kGradientStep);
  }
  return g;
}

double directional_derivative(std::span<const double> free_gradient, std::span<const double> x) {
  if (x.size() != free_gradient.size() + 1) {
    throw Error(Errc::invalid_direction, "direction has the wrong dimension");
  }
  double sum = 0.0;
  double scale = 1.0;
  for (double v : x) {
    sum += v;
    scale = std::max(scale, std::abs(v));
  }
  if (std::abs(sum) > 1e-12 * scale) {
    throw Error(Errc::invalid_direction, "direction components sum to " + fmt(sum) + ", expected 0");
  }
  // With Σx = 0, x = Σ_{i≥1} x_i (e_i - e_0).
  double v = 0.0;
  for (std::size_t i = 0; i < free_gradient.size(); ++i) v += free_gradient[i] * x[i + 1];
  return v;
}

double directional_derivative(const RoutingModel& model, const WltpVector& p,
                              std::span<const double> x, const FleetConfig& c) {
  if (x.size() != p.size()) throw Error(Errc::invalid_direction, "direction has the wrong dimension");
  if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) return 0.0;
  const auto g = wip_gradient(model, p, c);
  return directional_derivative(g, x);
}

std::vector<WltpVector> box_grid(std::size_t wltp_size, double lo, double hi, std::size_t count) {
  std::vector<WltpVector> grid;
  if (wltp_size < 2 || count == 0) return grid;
  const std::size_t free = wltp_size - 1;
  std::vector<std::size_t> idx(free, 0);
  auto value = [&](std::size_t k) {
    return count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  };
  while (true) {
    std::vector<double> p(wltp_size);
    double s = 0.0;
    for (std::size_t i = 0; i < free; ++i) {
      p[i + 1] = value(idx[i]);
      s += p[i + 1];
    }
    p[0] = 1.0 - s;
    if (p[0] > 0.0) grid.emplace_back(std::move(p));
    std::size_t d = 0;
    while (d < free && ++idx[d] == count) idx[d++] = 0;
    if (d == free) break;
  }
  return grid;
}

}  // namespace fabflow::queueing
