#pragma once

// Small queueing models with hand-derivable answers, shared by the tests.

#include <random>

#include "fabflow/queueing.hpp"

namespace fabflow::models {

using queueing::FleetConfig;
using queueing::RoutingModel;
using queueing::WltpVector;

/// One process station, external rate gamma, service rate mu.
RoutingModel single_station(double gamma, double mu);

/// Process stations 0 → 1, γ = (gamma, 0).
RoutingModel tandem(double gamma, double mu0, double mu1);

/// One process station feeding back to itself with probability `back`.
RoutingModel feedback(double gamma, double mu, double back);

/// Station 0 (γ, μ0) routes to station 1 (μ1) with probability p_1; WLTP
/// size 2, p_0 is the exit probability.
RoutingModel split(double gamma, double mu0, double mu1);

/// One transport station of type 0 and rate mu_base per vehicle.
RoutingModel transport_only(double gamma, double mu_base);

/// Routing independent of p.
RoutingModel constant_model();

struct RandomInstance {
  RoutingModel model;
  WltpVector p;
  FleetConfig c;
};

/// A transport hub T (one vehicle type) feeding n = 1..3 process stations with
/// probabilities p_1..p_n; each returns to T with a fixed probability drawn
/// from [0.1, max_return]. Drawn until every utilization is at most max_rho.
RandomInstance random_stable_instance(std::mt19937_64& rng, double max_rho, double max_return = 0.7);

}  // namespace fabflow::models
