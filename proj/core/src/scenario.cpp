#include "fabflow/scenario.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fabflow/error.hpp"
#include "json.hpp"

namespace fabflow::scenario {

using nlohmann::json;

namespace {

std::string shortest(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(value);
}

// Reads typed fields and records every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> issues;

  void issue(const std::string& path, const std::string& message) { issues.push_back(path + ": " + message); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    issue(path, "expected an object");
    return false;
  }

  bool array(const json& j, const std::string& path) {
    if (j.is_array()) return true;
    issue(path, "expected an array");
    return false;
  }

  void known_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> keys) {
    for (const auto& item : obj.items()) {
      if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
        issue(path + "." + item.key(), "unknown field");
      }
    }
  }

  const json* member(const json& obj, const char* key, const std::string& path, bool required) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
      if (required) issue(path + "." + key, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  void number(const json& obj, const char* key, const std::string& path, double& out, bool required = false) {
    if (const auto* j = member(obj, key, path, required)) {
      if (j->is_number()) {
        out = j->get<double>();
      } else {
        issue(path + "." + key, "expected a number");
      }
    }
  }

  void optional_number(const json& obj, const char* key, const std::string& path, std::optional<double>& out) {
    double v = 0.0;
    if (member(obj, key, path, false)) {
      number(obj, key, path, v);
      out = v;
    }
  }

  template <class Int>
  void integer(const json& obj, const char* key, const std::string& path, Int& out, bool required = false) {
    if (const auto* j = member(obj, key, path, required)) {
      if (j->is_number_integer()) {
        out = j->get<Int>();
      } else if (j->is_number_float() && std::floor(j->get<double>()) == j->get<double>()) {
        out = static_cast<Int>(j->get<double>());
      } else {
        issue(path + "." + key, "expected an integer");
      }
    }
  }

  void string(const json& obj, const char* key, const std::string& path, std::string& out, bool required = false) {
    if (const auto* j = member(obj, key, path, required)) {
      if (j->is_string()) {
        out = j->get<std::string>();
      } else {
        issue(path + "." + key, "expected a string");
      }
    }
  }

  void boolean(const json& obj, const char* key, const std::string& path, bool& out) {
    if (const auto* j = member(obj, key, path, false)) {
      if (j->is_boolean()) {
        out = j->get<bool>();
      } else {
        issue(path + "." + key, "expected true or false");
      }
    }
  }

  template <class Int>
  void integer_list(const json& obj, const char* key, const std::string& path, std::vector<Int>& out,
                    bool required = false) {
    const auto* j = member(obj, key, path, required);
    if (!j || !array(*j, path + "." + key)) return;
    out.clear();
    for (std::size_t i = 0; i < j->size(); ++i) {
      const auto& v = (*j)[i];
      if (v.is_number_integer()) {
        out.push_back(v.get<Int>());
      } else {
        issue(path + "." + key + "[" + std::to_string(i) + "]", "expected an integer");
      }
    }
  }

  void number_list(const json& obj, const char* key, const std::string& path, std::vector<double>& out,
                   bool required = false) {
    const auto* j = member(obj, key, path, required);
    if (!j || !array(*j, path + "." + key)) return;
    out.clear();
    for (std::size_t i = 0; i < j->size(); ++i) {
      const auto& v = (*j)[i];
      if (v.is_number()) {
        out.push_back(v.get<double>());
      } else {
        issue(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
      }
    }
  }

  void string_list(const json& obj, const char* key, const std::string& path, std::vector<std::string>& out,
                   bool required = false) {
    const auto* j = member(obj, key, path, required);
    if (!j || !array(*j, path + "." + key)) return;
    out.clear();
    for (std::size_t i = 0; i < j->size(); ++i) {
      const auto& v = (*j)[i];
      if (v.is_string()) {
        out.push_back(v.get<std::string>());
      } else {
        issue(path + "." + key + "[" + std::to_string(i) + "]", "expected a string");
      }
    }
  }
};

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// --- network ------------------------------------------------------------------

void read_network(Reader& r, const json& j, Scenario& s) {
  const std::string path = "network";
  if (!r.object(j, path)) return;
  r.known_keys(j, path, {"nodes", "edges", "demand_kg"});
  if (const auto* nodes = r.member(j, "nodes", path, true); nodes && r.array(*nodes, path + ".nodes")) {
    for (std::size_t i = 0; i < nodes->size(); ++i) {
      const auto& n = (*nodes)[i];
      const auto p = at(path + ".nodes", i);
      if (!r.object(n, p)) continue;
      r.known_keys(n, p, {"id", "kind"});
      netflow::NodeSpec node;
      std::string kind;
      r.string(n, "id", p, node.id, true);
      r.string(n, "kind", p, kind, true);
      if (!kind.empty()) {
        if (auto k = netflow::parse_node_kind(kind)) {
          node.kind = *k;
        } else {
          r.issue(p + ".kind", "unknown node kind '" + kind + "'");
        }
      }
      s.network.nodes.push_back(std::move(node));
    }
  }
  if (const auto* edges = r.member(j, "edges", path, true); edges && r.array(*edges, path + ".edges")) {
    for (std::size_t i = 0; i < edges->size(); ++i) {
      const auto& e = (*edges)[i];
      const auto p = at(path + ".edges", i);
      if (!r.object(e, p)) continue;
      r.known_keys(e, p, {"from", "to", "capacity_kg", "cost", "transit_time_h"});
      netflow::EdgeSpec edge;
      double cost = 0.0;
      r.string(e, "from", p, edge.from, true);
      r.string(e, "to", p, edge.to, true);
      r.integer(e, "capacity_kg", p, edge.capacity, true);
      r.number(e, "cost", p, cost);
      r.number(e, "transit_time_h", p, edge.transit_time_h);
      if (std::isfinite(cost) && cost >= 0.0) {
        edge.cost = netflow::Cost::from_double(cost);
      } else {
        r.issue(p + ".cost", "must be a finite non-negative number");
      }
      s.network.edges.push_back(std::move(edge));
    }
  }
  if (r.member(j, "demand_kg", path, false)) {
    netflow::Kilograms demand = 0;
    r.integer(j, "demand_kg", path, demand);
    s.demand_kg = demand;
  }
}

json write_network(const Scenario& s) {
  json nodes = json::array();
  for (const auto& n : s.network.nodes) nodes.push_back({{"id", n.id}, {"kind", netflow::to_string(n.kind)}});
  json edges = json::array();
  for (const auto& e : s.network.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"capacity_kg", e.capacity},
                     {"cost", e.cost.value()},
                     {"transit_time_h", e.transit_time_h}});
  }
  json out = {{"nodes", nodes}, {"edges", edges}};
  if (s.demand_kg) out["demand_kg"] = *s.demand_kg;
  return out;
}

// --- queueing and fleet -------------------------------------------------------

std::optional<std::variant<double, queueing::WltpRef>> parse_binding_value(std::string_view text) {
  auto parse_number = [](std::string_view t, auto& out) {
    auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc{} && end == t.data() + t.size() && !t.empty();
  };
  if (text.starts_with("const:")) {
    double v = 0.0;
    if (parse_number(text.substr(6), v)) return std::variant<double, queueing::WltpRef>(v);
  } else if (text.starts_with("p:")) {
    std::size_t idx = 0;
    if (parse_number(text.substr(2), idx)) return std::variant<double, queueing::WltpRef>(queueing::WltpRef{idx});
  }
  return std::nullopt;
}

std::string format_binding_value(const std::variant<double, queueing::WltpRef>& value) {
  if (const auto* c = std::get_if<double>(&value)) return "const:" + shortest(*c);
  return "p:" + std::to_string(std::get<queueing::WltpRef>(value).index);
}

// Vehicle-type names are resolved after the fleet section has been read.
struct PendingStations {
  std::vector<std::string> vehicle_type;  // per station; empty for process stations
};

void read_fleet(Reader& r, const json& j, Scenario& s) {
  const std::string path = "fleet";
  if (!r.object(j, path)) return;
  r.known_keys(j, path, {"types", "min", "max", "nominal"});
  FleetSection f;
  r.string_list(j, "types", path, f.types, true);
  r.integer_list(j, "min", path, f.min_counts, true);
  r.integer_list(j, "max", path, f.max_counts, true);
  r.integer_list(j, "nominal", path, f.nominal);
  s.fleet = std::move(f);
}

void read_queueing(Reader& r, const json& j, Scenario& s, PendingStations& pending) {
  const std::string path = "queueing";
  if (!r.object(j, path)) return;
  r.known_keys(j, path, {"stations", "routing", "nominal_p", "grid"});
  QueueingSection q;
  std::map<std::string, std::size_t> index;
  if (const auto* st = r.member(j, "stations", path, true); st && r.array(*st, path + ".stations")) {
    for (std::size_t i = 0; i < st->size(); ++i) {
      const auto& o = (*st)[i];
      const auto p = at(path + ".stations", i);
      if (!r.object(o, p)) continue;
      r.known_keys(o, p, {"id", "kind", "mu_base", "gamma", "vehicle_type"});
      queueing::StationProfile profile;
      std::string kind = "process";
      std::string vehicle_type;
      r.string(o, "id", p, profile.id, true);
      r.string(o, "kind", p, kind);
      r.number(o, "mu_base", p, profile.mu_base, true);
      r.number(o, "gamma", p, profile.gamma);
      r.string(o, "vehicle_type", p, vehicle_type);
      if (kind == "transport") {
        profile.kind = queueing::StationKind::transport;
        if (vehicle_type.empty()) r.issue(p + ".vehicle_type", "transport stations need a vehicle type");
      } else if (kind != "process") {
        r.issue(p + ".kind", "expected 'process' or 'transport'");
      }
      if (!index.emplace(profile.id, q.stations.size()).second) {
        r.issue(p + ".id", "duplicate station id '" + profile.id + "'");
      }
      pending.vehicle_type.push_back(profile.kind == queueing::StationKind::transport ? vehicle_type : "");
      q.stations.push_back(std::move(profile));
    }
  }
  if (const auto* rt = r.member(j, "routing", path, false); rt && r.array(*rt, path + ".routing")) {
    for (std::size_t i = 0; i < rt->size(); ++i) {
      const auto& o = (*rt)[i];
      const auto p = at(path + ".routing", i);
      if (!r.object(o, p)) continue;
      r.known_keys(o, p, {"from", "to", "value"});
      std::string from, to, value;
      r.string(o, "from", p, from, true);
      r.string(o, "to", p, to, true);
      r.string(o, "value", p, value, true);
      queueing::RoutingBinding b;
      bool ok = true;
      for (auto [name, slot] : {std::pair{&from, &b.from}, std::pair{&to, &b.to}}) {
        auto it = index.find(*name);
        if (it == index.end()) {
          if (!name->empty()) r.issue(p, "unknown station '" + *name + "'");
          ok = false;
        } else {
          *slot = it->second;
        }
      }
      if (auto v = parse_binding_value(value)) {
        b.value = *v;
      } else {
        if (!value.empty()) r.issue(p + ".value", "expected 'const:<x>' or 'p:<index>', got '" + value + "'");
        ok = false;
      }
      if (ok) q.routing.push_back(b);
    }
  }
  std::vector<double> nominal;
  r.number_list(j, "nominal_p", path, nominal, true);
  q.nominal_p = queueing::WltpVector(std::move(nominal));
  if (const auto* g = r.member(j, "grid", path, false); g && r.object(*g, path + ".grid")) {
    r.known_keys(*g, path + ".grid", {"lo", "hi", "count"});
    GridSpec grid;
    r.number(*g, "lo", path + ".grid", grid.lo, true);
    r.number(*g, "hi", path + ".grid", grid.hi, true);
    r.integer(*g, "count", path + ".grid", grid.count, true);
    q.grid = grid;
  }
  s.queueing = std::move(q);
}

void resolve_vehicle_types(Reader& r, Scenario& s, const PendingStations& pending) {
  if (!s.queueing) return;
  for (std::size_t i = 0; i < pending.vehicle_type.size(); ++i) {
    const auto& name = pending.vehicle_type[i];
    if (name.empty()) continue;
    const auto p = at("queueing.stations", i) + ".vehicle_type";
    if (!s.fleet) {
      r.issue(p, "transport stations need a fleet section");
      continue;
    }
    auto it = std::find(s.fleet->types.begin(), s.fleet->types.end(), name);
    if (it == s.fleet->types.end()) {
      r.issue(p, "unknown vehicle type '" + name + "'");
    } else {
      s.queueing->stations[i].vehicle_type = static_cast<std::size_t>(it - s.fleet->types.begin());
    }
  }
}

json write_queueing(const Scenario& s) {
  const auto& q = *s.queueing;
  json stations = json::array();
  for (const auto& st : q.stations) {
    json o = {{"id", st.id},
              {"kind", st.kind == queueing::StationKind::transport ? "transport" : "process"},
              {"mu_base", st.mu_base},
              {"gamma", st.gamma}};
    if (st.kind == queueing::StationKind::transport) {
      o["vehicle_type"] = s.fleet && st.vehicle_type < s.fleet->types.size() ? s.fleet->types[st.vehicle_type]
                                                                             : std::to_string(st.vehicle_type);
    }
    stations.push_back(std::move(o));
  }
  json routing = json::array();
  for (const auto& b : q.routing) {
    routing.push_back(
        {{"from", q.stations[b.from].id}, {"to", q.stations[b.to].id}, {"value", format_binding_value(b.value)}});
  }
  json out = {{"stations", stations}, {"routing", routing}, {"nominal_p", q.nominal_p.vector()}};
  if (q.grid) out["grid"] = {{"lo", q.grid->lo}, {"hi", q.grid->hi}, {"count", q.grid->count}};
  return out;
}

json write_fleet(const FleetSection& f) {
  return {{"types", f.types}, {"min", f.min_counts}, {"max", f.max_counts}, {"nominal", f.nominal}};
}

// --- limits -------------------------------------------------------------------

void read_limits(Reader& r, const json& j, Scenario& s) {
  const std::string path = "limits";
  if (!r.object(j, path)) return;
  r.known_keys(j, path,
               {"c_max", "w_star", "u", "delta_wip_max", "epsilon", "eta", "neighborhood_radius", "mc_samples",
                "dirichlet_alpha", "mc_seed"});
  auto& l = s.limits;
  r.integer(j, "c_max", path, l.c_max, true);
  r.number(j, "w_star", path, l.w_star, true);
  r.number(j, "u", path, l.u, true);
  r.number(j, "delta_wip_max", path, l.delta_wip_max, true);
  r.number(j, "epsilon", path, l.epsilon);
  r.number(j, "eta", path, l.eta);
  r.optional_number(j, "neighborhood_radius", path, l.neighborhood_radius);
  r.integer(j, "mc_samples", path, l.mc_samples);
  r.number(j, "dirichlet_alpha", path, l.dirichlet_alpha);
  r.integer(j, "mc_seed", path, l.mc_seed);
}

json write_limits(const planner::PlannerLimits& l) {
  json out = {{"c_max", l.c_max},
              {"w_star", l.w_star},
              {"u", l.u},
              {"delta_wip_max", l.delta_wip_max},
              {"epsilon", l.epsilon},
              {"eta", l.eta},
              {"mc_samples", l.mc_samples},
              {"dirichlet_alpha", l.dirichlet_alpha},
              {"mc_seed", l.mc_seed}};
  if (l.neighborhood_radius) out["neighborhood_radius"] = *l.neighborhood_radius;
  return out;
}

// --- scheduling ---------------------------------------------------------------

void read_scheduling(Reader& r, const json& j, Scenario& s) {
  const std::string path = "scheduling";
  if (!r.object(j, path)) return;
  r.known_keys(j, path, {"tasks", "vehicles", "distances", "baseline_vehicle", "productivity"});
  SchedulingSection sec;
  if (const auto* tasks = r.member(j, "tasks", path, true); tasks && r.array(*tasks, path + ".tasks")) {
    for (std::size_t i = 0; i < tasks->size(); ++i) {
      const auto& o = (*tasks)[i];
      const auto p = at(path + ".tasks", i);
      if (!r.object(o, p)) continue;
      r.known_keys(o, p, {"id", "type", "origin", "destination", "lot_mass_kg", "baseline_duration_h"});
      scheduler::TransportTask t;
      std::string type;
      r.string(o, "id", p, t.id, true);
      r.string(o, "type", p, type, true);
      r.string(o, "origin", p, t.origin, true);
      r.string(o, "destination", p, t.destination, true);
      r.number(o, "lot_mass_kg", p, t.lot_mass_kg);
      r.number(o, "baseline_duration_h", p, t.baseline_duration_h);
      if (!type.empty()) {
        if (auto tt = scheduler::parse_task_type(type)) {
          t.type = *tt;
        } else {
          r.issue(p + ".type", "expected one of A, B, C, D, E");
        }
      }
      sec.tasks.push_back(std::move(t));
    }
  }
  if (const auto* vs = r.member(j, "vehicles", path, true); vs && r.array(*vs, path + ".vehicles")) {
    for (std::size_t i = 0; i < vs->size(); ++i) {
      const auto& o = (*vs)[i];
      const auto p = at(path + ".vehicles", i);
      if (!r.object(o, p)) continue;
      r.known_keys(o, p, {"id", "speed", "load_time_h", "unload_time_h", "cost_rate"});
      scheduler::VehicleSpec v;
      r.string(o, "id", p, v.id, true);
      r.number(o, "speed", p, v.speed, true);
      r.number(o, "load_time_h", p, v.load_time_h);
      r.number(o, "unload_time_h", p, v.unload_time_h);
      r.number(o, "cost_rate", p, v.cost_rate);
      sec.vehicles.push_back(std::move(v));
    }
  }
  if (const auto* ds = r.member(j, "distances", path, true); ds && r.array(*ds, path + ".distances")) {
    for (std::size_t i = 0; i < ds->size(); ++i) {
      const auto& o = (*ds)[i];
      const auto p = at(path + ".distances", i);
      if (!r.object(o, p)) continue;
      r.known_keys(o, p, {"from", "to", "distance"});
      std::string from, to;
      double d = 0.0;
      r.string(o, "from", p, from, true);
      r.string(o, "to", p, to, true);
      r.number(o, "distance", p, d, true);
      if (sec.distances.find(from, to)) r.issue(p, "duplicate distance " + from + " -> " + to);
      sec.distances.set(from, to, d);
    }
  }
  r.string(j, "baseline_vehicle", path, sec.baseline_vehicle, true);
  std::string productivity = "per_makespan";
  r.string(j, "productivity", path, productivity);
  if (productivity == "per_busy_time") {
    sec.productivity = scheduler::ProductivityMode::per_busy_time;
  } else if (productivity != "per_makespan") {
    r.issue(path + ".productivity", "expected 'per_makespan' or 'per_busy_time'");
  }
  s.scheduling = std::move(sec);
}

json write_scheduling(const SchedulingSection& sec) {
  json tasks = json::array();
  for (const auto& t : sec.tasks) {
    tasks.push_back({{"id", t.id},
                     {"type", scheduler::to_string(t.type)},
                     {"origin", t.origin},
                     {"destination", t.destination},
                     {"lot_mass_kg", t.lot_mass_kg},
                     {"baseline_duration_h", t.baseline_duration_h}});
  }
  json vehicles = json::array();
  for (const auto& v : sec.vehicles) {
    vehicles.push_back({{"id", v.id},
                        {"speed", v.speed},
                        {"load_time_h", v.load_time_h},
                        {"unload_time_h", v.unload_time_h},
                        {"cost_rate", v.cost_rate}});
  }
  json distances = json::array();
  for (const auto& [key, d] : sec.distances.entries()) {
    distances.push_back({{"from", key.first}, {"to", key.second}, {"distance", d}});
  }
  return {{"tasks", tasks},
          {"vehicles", vehicles},
          {"distances", distances},
          {"baseline_vehicle", sec.baseline_vehicle},
          {"productivity",
           sec.productivity == scheduler::ProductivityMode::per_makespan ? "per_makespan" : "per_busy_time"}};
}

// --- metaheuristics -------------------------------------------------------------

void read_metaheuristics(Reader& r, const json& j, Scenario& s) {
  const std::string path = "metaheuristics";
  if (!r.object(j, path)) return;
  r.known_keys(j, path, {"ga", "sa", "aco", "benchmark_seeds"});
  auto& m = s.metaheuristics;
  if (const auto* ga = r.member(j, "ga", path, false); ga && r.object(*ga, path + ".ga")) {
    const auto p = path + ".ga";
    r.known_keys(*ga, p, {"population", "generations", "crossover_rate", "mutation_rate"});
    r.integer(*ga, "population", p, m.ga.population);
    r.integer(*ga, "generations", p, m.ga.generations);
    r.number(*ga, "crossover_rate", p, m.ga.crossover_rate);
    r.optional_number(*ga, "mutation_rate", p, m.ga.mutation_rate);
  }
  if (const auto* sa = r.member(j, "sa", path, false); sa && r.object(*sa, path + ".sa")) {
    const auto p = path + ".sa";
    r.known_keys(*sa, p, {"t0", "cooling", "iterations_per_temperature", "t_min", "normalization_samples"});
    r.number(*sa, "t0", p, m.sa.t0);
    r.number(*sa, "cooling", p, m.sa.cooling);
    r.integer(*sa, "iterations_per_temperature", p, m.sa.iterations_per_temperature);
    r.number(*sa, "t_min", p, m.sa.t_min);
    r.integer(*sa, "normalization_samples", p, m.sa.normalization_samples);
  }
  if (const auto* aco = r.member(j, "aco", path, false); aco && r.object(*aco, path + ".aco")) {
    const auto p = path + ".aco";
    r.known_keys(*aco, p,
                 {"ants", "iterations", "evaporation", "pheromone_init", "alpha", "beta", "normalization_samples"});
    r.integer(*aco, "ants", p, m.aco.ants);
    r.integer(*aco, "iterations", p, m.aco.iterations);
    r.number(*aco, "evaporation", p, m.aco.evaporation);
    r.number(*aco, "pheromone_init", p, m.aco.pheromone_init);
    r.number(*aco, "alpha", p, m.aco.alpha);
    r.number(*aco, "beta", p, m.aco.beta);
    r.integer(*aco, "normalization_samples", p, m.aco.normalization_samples);
  }
  r.integer_list(j, "benchmark_seeds", path, m.benchmark_seeds);
}

json write_metaheuristics(const scheduler::MetaheuristicParams& m) {
  json ga = {{"population", m.ga.population},
             {"generations", m.ga.generations},
             {"crossover_rate", m.ga.crossover_rate}};
  if (m.ga.mutation_rate) ga["mutation_rate"] = *m.ga.mutation_rate;
  return {{"ga", ga},
          {"sa",
           {{"t0", m.sa.t0},
            {"cooling", m.sa.cooling},
            {"iterations_per_temperature", m.sa.iterations_per_temperature},
            {"t_min", m.sa.t_min},
            {"normalization_samples", m.sa.normalization_samples}}},
          {"aco",
           {{"ants", m.aco.ants},
            {"iterations", m.aco.iterations},
            {"evaporation", m.aco.evaporation},
            {"pheromone_init", m.aco.pheromone_init},
            {"alpha", m.aco.alpha},
            {"beta", m.aco.beta},
            {"normalization_samples", m.aco.normalization_samples}}},
          {"benchmark_seeds", m.benchmark_seeds}};
}

// --- metadata -----------------------------------------------------------------

void read_metadata(Reader& r, const json& j, Scenario& s) {
  const std::string path = "metadata";
  if (!r.object(j, path)) return;
  r.known_keys(j, path, {"expected_improvements"});
  const auto* list = r.member(j, "expected_improvements", path, false);
  if (!list || !r.array(*list, path + ".expected_improvements")) return;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const auto& o = (*list)[i];
    const auto p = at(path + ".expected_improvements", i);
    if (!r.object(o, p)) continue;
    r.known_keys(o, p, {"id", "metric", "percent", "gated", "gate_percent", "note"});
    ExpectedImprovement e;
    r.string(o, "id", p, e.id, true);
    r.string(o, "metric", p, e.metric, true);
    r.number(o, "percent", p, e.percent, true);
    r.boolean(o, "gated", p, e.gated);
    r.number(o, "gate_percent", p, e.gate_percent);
    r.string(o, "note", p, e.note);
    s.expected_improvements.push_back(std::move(e));
  }
}

json write_metadata(const Scenario& s) {
  json list = json::array();
  for (const auto& e : s.expected_improvements) {
    list.push_back(
        {{"id", e.id},
         {"metric", e.metric},
         {"percent", e.percent},
         {"gated", e.gated},
         {"gate_percent", e.gate_percent},
         {"note", e.note}});
  }
  return {{"expected_improvements", list}};
}

json to_document(const Scenario& s) {
  json doc = {{"schema_version", s.schema_version},
              {"name", s.name},
              {"description", s.description},
              {"limits", write_limits(s.limits)},
              {"metaheuristics", write_metaheuristics(s.metaheuristics)},
              {"metadata", write_metadata(s)}};
  if (s.has_network() || s.demand_kg) doc["network"] = write_network(s);
  if (s.queueing) doc["queueing"] = write_queueing(s);
  if (s.fleet) doc["fleet"] = write_fleet(*s.fleet);
  if (s.scheduling) doc["scheduling"] = write_scheduling(*s.scheduling);
  return doc;
}

Scenario from_document(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::parse_error, "scenario must be a JSON object");
  const auto version = doc.find("schema_version");
  if (version == doc.end() || !version->is_number_integer()) {
    throw ValidationError({"schema_version: missing required integer field"});
  }
  if (version->get<long long>() != kSchemaVersion) {
    throw Error(Errc::schema_version_unsupported, "schema_version " + version->dump() +
                                                      " is not supported (expected " +
                                                      std::to_string(kSchemaVersion) + ")");
  }

  Reader r;
  Scenario s;
  r.known_keys(doc, "scenario",
               {"schema_version", "name", "description", "network", "queueing", "fleet", "limits", "scheduling",
                "metaheuristics", "metadata"});
  r.string(doc, "name", "scenario", s.name, true);
  r.string(doc, "description", "scenario", s.description);
  PendingStations pending;
  if (const auto* j = r.member(doc, "network", "scenario", false)) read_network(r, *j, s);
  if (const auto* j = r.member(doc, "fleet", "scenario", false)) read_fleet(r, *j, s);
  if (const auto* j = r.member(doc, "queueing", "scenario", false)) read_queueing(r, *j, s, pending);
  if (const auto* j = r.member(doc, "limits", "scenario", false)) read_limits(r, *j, s);
  if (const auto* j = r.member(doc, "scheduling", "scenario", false)) read_scheduling(r, *j, s);
  if (const auto* j = r.member(doc, "metaheuristics", "scenario", false)) read_metaheuristics(r, *j, s);
  if (const auto* j = r.member(doc, "metadata", "scenario", false)) read_metadata(r, *j, s);
  resolve_vehicle_types(r, s, pending);

  auto issues = std::move(r.issues);
  for (auto& i : validate(s)) issues.push_back(std::move(i));
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return s;
}

template <class T>
void check_unique(const std::vector<T>& items, const std::string& what, std::vector<std::string>& issues) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second) issues.push_back(what + ": duplicate id '" + item.id + "'");
  }
}

void validate_network(const Scenario& s, std::vector<std::string>& issues) {
  if (!s.has_network()) {
    if (!s.network.edges.empty()) issues.emplace_back("network: edges declared without nodes");
    return;
  }
  check_unique(s.network.nodes, "network.nodes", issues);
  std::set<std::string> ids;
  for (const auto& n : s.network.nodes) ids.insert(n.id);
  bool local_ok = issues.empty();
  for (std::size_t i = 0; i < s.network.edges.size(); ++i) {
    const auto& e = s.network.edges[i];
    const auto p = at("network.edges", i);
    for (const auto* end : {&e.from, &e.to}) {
      if (!ids.count(*end)) {
        issues.push_back(p + ": unknown node '" + *end + "'");
        local_ok = false;
      }
    }
    if (e.capacity < 0) {
      issues.push_back(p + ".capacity_kg: must be >= 0");
      local_ok = false;
    }
    if (!(e.transit_time_h >= 0.0)) issues.push_back(p + ".transit_time_h: must be >= 0");
  }
  if (local_ok) {
    try {
      (void)netflow::build_network(s.network);
    } catch (const Error& e) {
      issues.push_back(std::string("network: ") + e.what());
    }
  }
  if (s.demand_kg && *s.demand_kg < 0) issues.emplace_back("network.demand_kg: must be >= 0");
}

void validate_fleet(const FleetSection& f, std::vector<std::string>& issues) {
  const auto n = f.types.size();
  if (n == 0) issues.emplace_back("fleet.types: at least one vehicle type is required");
  if (f.min_counts.size() != n || f.max_counts.size() != n) {
    issues.emplace_back("fleet: min and max need one entry per vehicle type");
    return;
  }
  if (!f.nominal.empty() && f.nominal.size() != n) {
    issues.emplace_back("fleet.nominal: needs one entry per vehicle type");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen.insert(f.types[i]).second) issues.push_back("fleet.types: duplicate type '" + f.types[i] + "'");
    if (f.min_counts[i] < 0 || f.min_counts[i] > f.max_counts[i]) {
      issues.push_back("fleet: type '" + f.types[i] + "' needs 0 <= min <= max");
    }
    if (i < f.nominal.size() && f.nominal[i] < 0) issues.push_back("fleet.nominal: counts must be >= 0");
  }
}

void validate_queueing(const Scenario& s, std::vector<std::string>& issues) {
  const auto& q = *s.queueing;
  if (q.stations.empty()) issues.emplace_back("queueing.stations: at least one station is required");
  for (auto& v : queueing::wltp_violations(q.nominal_p)) issues.push_back("queueing.nominal_p: " + v);
  for (std::size_t i = 0; i < q.stations.size(); ++i) {
    const auto& st = q.stations[i];
    if (st.kind == queueing::StationKind::transport && s.fleet && st.vehicle_type >= s.fleet->types.size()) {
      issues.push_back(at("queueing.stations", i) + ".vehicle_type: out of range");
    }
  }
  if (q.grid && !(q.grid->lo > 0.0 && q.grid->lo <= q.grid->hi && q.grid->hi < 1.0 && q.grid->count >= 2)) {
    issues.emplace_back("queueing.grid: needs 0 < lo <= hi < 1 and count >= 2");
  }
  if (q.stations.empty()) return;
  try {
    const auto model = q.model();
    if (q.nominal_p.size() > 0 && queueing::wltp_violations(q.nominal_p).empty()) (void)model.matrix(q.nominal_p);
  } catch (const Error& e) {
    issues.push_back(std::string("queueing: ") + e.what());
  }
}

void validate_scheduling(const SchedulingSection& sec, std::vector<std::string>& issues) {
  if (sec.tasks.empty()) issues.emplace_back("scheduling.tasks: at least one task is required");
  if (sec.vehicles.empty()) issues.emplace_back("scheduling.vehicles: at least one vehicle is required");
  check_unique(sec.tasks, "scheduling.tasks", issues);
  check_unique(sec.vehicles, "scheduling.vehicles", issues);
  for (std::size_t i = 0; i < sec.tasks.size(); ++i) {
    const auto& t = sec.tasks[i];
    const auto p = at("scheduling.tasks", i);
    if (!(t.lot_mass_kg > 0.0)) issues.push_back(p + ".lot_mass_kg: must be > 0");
    if (!(t.baseline_duration_h >= 0.0)) issues.push_back(p + ".baseline_duration_h: must be >= 0");
    if (t.origin == t.destination) issues.push_back(p + ": origin and destination must differ");
    if (!sec.distances.find(t.origin, t.destination)) {
      issues.push_back(p + ": no distance from '" + t.origin + "' to '" + t.destination + "'");
    }
  }
  for (std::size_t i = 0; i < sec.vehicles.size(); ++i) {
    const auto& v = sec.vehicles[i];
    const auto p = at("scheduling.vehicles", i);
    if (!(v.speed > 0.0)) issues.push_back(p + ".speed: must be > 0");
    if (!(v.load_time_h >= 0.0)) issues.push_back(p + ".load_time_h: must be >= 0");
    if (!(v.unload_time_h >= 0.0)) issues.push_back(p + ".unload_time_h: must be >= 0");
    if (!(v.cost_rate >= 0.0)) issues.push_back(p + ".cost_rate: must be >= 0");
  }
  for (const auto& [key, d] : sec.distances.entries()) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      issues.push_back("scheduling.distances: " + key.first + " -> " + key.second + " must be >= 0");
    }
  }
  const bool known = std::any_of(sec.vehicles.begin(), sec.vehicles.end(),
                                 [&](const auto& v) { return v.id == sec.baseline_vehicle; });
  if (!known) issues.push_back("scheduling.baseline_vehicle: unknown vehicle '" + sec.baseline_vehicle + "'");
}

void validate_metaheuristics(const scheduler::MetaheuristicParams& m, std::vector<std::string>& issues) {
  if (m.ga.population < 2) issues.emplace_back("metaheuristics.ga.population: must be >= 2");
  if (m.ga.generations < 0) issues.emplace_back("metaheuristics.ga.generations: must be >= 0");
  if (!(m.ga.crossover_rate >= 0.0 && m.ga.crossover_rate <= 1.0)) {
    issues.emplace_back("metaheuristics.ga.crossover_rate: must lie in [0, 1]");
  }
  if (m.ga.mutation_rate && !(*m.ga.mutation_rate >= 0.0 && *m.ga.mutation_rate <= 1.0)) {
    issues.emplace_back("metaheuristics.ga.mutation_rate: must lie in [0, 1]");
  }
  if (!(m.sa.t0 > 0.0)) issues.emplace_back("metaheuristics.sa.t0: must be > 0");
  if (!(m.sa.cooling > 0.0 && m.sa.cooling < 1.0)) issues.emplace_back("metaheuristics.sa.cooling: must lie in (0, 1)");
  if (m.sa.iterations_per_temperature < 1) {
    issues.emplace_back("metaheuristics.sa.iterations_per_temperature: must be >= 1");
  }
  if (!(m.sa.t_min > 0.0)) issues.emplace_back("metaheuristics.sa.t_min: must be > 0");
  if (m.aco.ants < 1) issues.emplace_back("metaheuristics.aco.ants: must be >= 1");
  if (m.aco.iterations < 1) issues.emplace_back("metaheuristics.aco.iterations: must be >= 1");
  if (!(m.aco.evaporation > 0.0 && m.aco.evaporation <= 1.0)) {
    issues.emplace_back("metaheuristics.aco.evaporation: must lie in (0, 1]");
  }
  if (!(m.aco.pheromone_init > 0.0)) issues.emplace_back("metaheuristics.aco.pheromone_init: must be > 0");
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

}  // namespace

queueing::RoutingModel QueueingSection::model() const {
  return queueing::RoutingModel(stations, routing, nominal_p.size());
}

std::vector<queueing::WltpVector> QueueingSection::grid_points() const {
  if (!grid) return {};
  return queueing::box_grid(nominal_p.size(), grid->lo, grid->hi, grid->count);
}

scheduler::SchedulingProblem SchedulingSection::problem() const {
  return {tasks, vehicles, distances, productivity};
}

std::size_t SchedulingSection::baseline_index() const {
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    if (vehicles[i].id == baseline_vehicle) return i;
  }
  throw Error(Errc::invalid_argument, "unknown baseline vehicle '" + baseline_vehicle + "'");
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> issues;
  if (s.name.empty()) issues.emplace_back("name: must not be empty");
  validate_network(s, issues);
  if (s.fleet) validate_fleet(*s.fleet, issues);
  if (s.queueing) validate_queueing(s, issues);
  for (auto& v : planner::limit_violations(s.limits)) issues.push_back(std::move(v));
  if (s.scheduling) validate_scheduling(*s.scheduling, issues);
  validate_metaheuristics(s.metaheuristics, issues);
  return issues;
}

Scenario parse_scenario(std::string_view json_text) { return from_document(parse_json(json_text)); }

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string to_json(const Scenario& scenario) { return to_document(scenario).dump(2) + "\n"; }

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write scenario file '" + path.string() + "'");
  out << to_json(scenario);
  if (!out) throw Error(Errc::io_error, "failed writing '" + path.string() + "'");
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::io_error, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string inputs_digest(const Scenario& scenario) {
  auto doc = to_document(scenario);
  doc.erase("description");
  return sha256_hex(doc.dump());
}

const std::vector<std::string>& override_keys() {
  static const std::vector<std::string> keys = {
      "network.demand_kg",
      "queueing.nominal_p",
      "fleet.min",
      "fleet.max",
      "fleet.nominal",
      "limits.c_max",
      "limits.w_star",
      "limits.u",
      "limits.delta_wip_max",
      "limits.epsilon",
      "limits.eta",
      "limits.neighborhood_radius",
      "limits.mc_samples",
      "limits.dirichlet_alpha",
      "limits.mc_seed",
      "scheduling.productivity",
      "scheduling.baseline_vehicle",
      "metaheuristics.ga.population",
      "metaheuristics.ga.generations",
      "metaheuristics.ga.crossover_rate",
      "metaheuristics.ga.mutation_rate",
      "metaheuristics.sa.t0",
      "metaheuristics.sa.cooling",
      "metaheuristics.sa.iterations_per_temperature",
      "metaheuristics.sa.t_min",
      "metaheuristics.aco.ants",
      "metaheuristics.aco.iterations",
      "metaheuristics.aco.evaporation",
      "metaheuristics.aco.alpha",
      "metaheuristics.aco.beta",
      "metaheuristics.benchmark_seeds",
  };
  return keys;
}

Scenario apply_override(const Scenario& scenario, std::string_view key, std::string_view value) {
  const auto& keys = override_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ValidationError({"override: unknown key '" + std::string(key) + "'"});
  }
  json parsed;
  try {
    parsed = json::parse(value.begin(), value.end());
  } catch (const json::parse_error&) {
    parsed = std::string(value);
  }
  auto doc = to_document(scenario);
  std::string pointer = "/" + std::string(key);
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  const json::json_pointer ptr(pointer);
  if (!doc.contains(ptr.parent_pointer())) {
    throw ValidationError({"override: scenario has no section for '" + std::string(key) + "'"});
  }
  doc[ptr] = std::move(parsed);
  return from_document(doc);
}

}  // namespace fabflow::scenario
