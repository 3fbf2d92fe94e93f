#include "models.hpp"

#include <algorithm>
#include <string>

#include "fabflow/error.hpp"

namespace fabflow::models {

using queueing::RoutingBinding;
using queueing::StationKind;
using queueing::StationProfile;
using queueing::WltpRef;

RoutingModel single_station(double gamma, double mu) {
  return RoutingModel({{"S", StationKind::process, mu, gamma, 0}}, {}, 2);
}

RoutingModel tandem(double gamma, double mu0, double mu1) {
  return RoutingModel({{"A", StationKind::process, mu0, gamma, 0}, {"B", StationKind::process, mu1, 0.0, 0}},
                      {{0, 1, 1.0}}, 2);
}

RoutingModel feedback(double gamma, double mu, double back) {
  return RoutingModel({{"F", StationKind::process, mu, gamma, 0}}, {{0, 0, back}}, 2);
}

RoutingModel split(double gamma, double mu0, double mu1) {
  return RoutingModel({{"A", StationKind::process, mu0, gamma, 0}, {"B", StationKind::process, mu1, 0.0, 0}},
                      {{0, 1, WltpRef{1}}}, 2);
}

RoutingModel transport_only(double gamma, double mu_base) {
  return RoutingModel({{"T", StationKind::transport, mu_base, gamma, 0}}, {}, 2);
}

RoutingModel constant_model() {
  return RoutingModel({{"A", StationKind::process, 3.0, 1.0, 0}, {"B", StationKind::process, 2.0, 0.0, 0}},
                      {{0, 1, 0.5}}, 3);
}

RandomInstance random_stable_instance(std::mt19937_64& rng, double max_rho, double max_return) {
  std::uniform_int_distribution<int> stations(1, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> vehicles(1, 4);
  for (;;) {
    const int n = stations(rng);
    std::vector<StationProfile> profile{{"T", StationKind::transport, 0.5 + 2.0 * unit(rng), 0.2 + unit(rng), 0}};
    std::vector<RoutingBinding> routing;
    for (int i = 1; i <= n; ++i) {
      profile.push_back({"A" + std::to_string(i), StationKind::process, 1.0 + 4.0 * unit(rng), 0.0, 0});
      routing.push_back({0, static_cast<std::size_t>(i), WltpRef{static_cast<std::size_t>(i)}});
      routing.push_back({static_cast<std::size_t>(i), 0, 0.1 + (max_return - 0.1) * unit(rng)});
    }
    // Interior simplex point with every component in [0.05, 0.95].
    std::vector<double> p(n + 1);
    double total = 0.0;
    for (auto& v : p) total += (v = 0.1 + unit(rng));
    for (auto& v : p) v /= total;
    RandomInstance inst{RoutingModel(std::move(profile), std::move(routing), static_cast<std::size_t>(n + 1)),
                        WltpVector(p), FleetConfig{{vehicles(rng)}}};
    try {
      const auto report = queueing::wip(inst.model, inst.p, inst.c);
      if (*std::max_element(report.utilizations.begin(), report.utilizations.end()) <= max_rho) return inst;
    } catch (const Error&) {
    }
  }
}

}  // namespace fabflow::models
