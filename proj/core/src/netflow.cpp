#include "fabflow/netflow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <utility>

#include "fabflow/error.hpp"

namespace fabflow::netflow {

Cost Cost::from_double(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw Error(Errc::invalid_edge, "edge cost must be a finite non-negative number");
  }
  return Cost{std::llround(value * static_cast<double>(kScale))};
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::source: return "source";
    case NodeKind::production: return "production";
    case NodeKind::logistics: return "logistics";
    case NodeKind::destination: return "destination";
    case NodeKind::sink: return "sink";
  }
  return "logistics";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  for (auto kind : {NodeKind::source, NodeKind::production, NodeKind::logistics,
                    NodeKind::destination, NodeKind::sink}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

bool is_origin(NodeKind kind) {
  return kind == NodeKind::source || kind == NodeKind::production;
}

bool is_destination(NodeKind kind) {
  return kind == NodeKind::destination || kind == NodeKind::sink;
}

std::optional<std::size_t> FlowNetwork::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FlowNetwork::named_node_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return !n.synthetic; }));
}

std::size_t FlowNetwork::declared_edge_count() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return !e.synthetic; }));
}

FlowNetwork build_network(const NetworkSpec& spec) {
  FlowNetwork net;
  for (const auto& node : spec.nodes) {
    if (node.id.empty()) throw Error(Errc::invalid_edge, "node id must not be empty");
    if (!net.index_.emplace(node.id, net.nodes_.size()).second ||
        node.id == kSyntheticSourceId || node.id == kSyntheticSinkId) {
      throw Error(Errc::duplicate_node, "duplicate node id '" + node.id + "'");
    }
    net.nodes_.push_back({node.id, node.kind, false});
  }

  std::set<std::pair<std::size_t, std::size_t>> seen;
  Kilograms finite_total = 0;
  for (const auto& edge : spec.edges) {
    auto from = net.find(edge.from);
    auto to = net.find(edge.to);
    if (!from || !to) {
      throw Error(Errc::dangling_edge, "edge " + edge.from + "->" + edge.to +
                                           " references unknown node '" +
                                           (from ? edge.to : edge.from) + "'");
    }
    if (*from == *to) throw Error(Errc::invalid_edge, "self-loop on '" + edge.from + "'");
    if (edge.capacity < 0) {
      throw Error(Errc::invalid_edge, "negative capacity on " + edge.from + "->" + edge.to);
    }
    if (edge.cost.micros < 0 || !(edge.transit_time_h >= 0.0)) {
      throw Error(Errc::invalid_edge, "negative cost or transit time on " + edge.from + "->" + edge.to);
    }
    if (!seen.emplace(*from, *to).second) {
      throw Error(Errc::invalid_edge, "parallel edge " + edge.from + "->" + edge.to);
    }
    finite_total += edge.capacity;
    net.edges_.push_back({*from, *to, edge.capacity, edge.cost, edge.transit_time_h, false});
  }

  std::vector<std::size_t> origins;
  std::vector<std::size_t> destinations;
  for (std::size_t i = 0; i < net.nodes_.size(); ++i) {
    if (is_origin(net.nodes_[i].kind)) origins.push_back(i);
    if (is_destination(net.nodes_[i].kind)) destinations.push_back(i);
  }
  if (origins.empty() || destinations.empty()) {
    throw Error(Errc::no_origin_or_destination,
                "network needs at least one origin and one destination node");
  }

  const Kilograms infinite = finite_total + 1;
  auto attach = [&](std::string_view id, NodeKind kind, const std::vector<std::size_t>& ends,
                    bool outgoing) {
    const std::size_t hub = net.nodes_.size();
    net.nodes_.push_back({std::string(id), kind, true});
    net.index_.emplace(std::string(id), hub);
    for (auto end : ends) {
      net.edges_.push_back({outgoing ? hub : end, outgoing ? end : hub, infinite, Cost{}, 0.0, true});
    }
    return hub;
  };
  net.source_ = origins.size() == 1
                    ? origins.front()
                    : attach(kSyntheticSourceId, NodeKind::source, origins, true);
  net.sink_ = destinations.size() == 1
                  ? destinations.front()
                  : attach(kSyntheticSinkId, NodeKind::sink, destinations, false);
  return net;
}

namespace {

// Residual graph with paired arcs: arc 2k is edge k, arc 2k+1 its reverse.
struct Residual {
  struct Arc {
    std::size_t to;
    Kilograms residual;
    std::int64_t cost;
  };

  explicit Residual(const FlowNetwork& net) : adjacency(net.nodes().size()) {
    arcs.reserve(net.edges().size() * 2);
    for (std::size_t k = 0; k < net.edges().size(); ++k) {
      const auto& e = net.edges()[k];
      adjacency[e.from].push_back(arcs.size());
      arcs.push_back({e.to, e.capacity, e.cost.micros});
      adjacency[e.to].push_back(arcs.size());
      arcs.push_back({e.from, 0, -e.cost.micros});
    }
  }

  void push(std::size_t arc, Kilograms amount) {
    arcs[arc].residual -= amount;
    arcs[arc ^ 1U].residual += amount;
  }

  std::vector<Kilograms> edge_flows() const {
    std::vector<Kilograms> flow(arcs.size() / 2);
    for (std::size_t k = 0; k < flow.size(); ++k) flow[k] = arcs[2 * k + 1].residual;
    return flow;
  }

  std::vector<bool> reachable_from(std::size_t start) const {
    std::vector<bool> seen(adjacency.size(), false);
    std::queue<std::size_t> frontier;
    seen[start] = true;
    frontier.push(start);
    while (!frontier.empty()) {
      const auto u = frontier.front();
      frontier.pop();
      for (auto a : adjacency[u]) {
        if (arcs[a].residual > 0 && !seen[arcs[a].to]) {
          seen[arcs[a].to] = true;
          frontier.push(arcs[a].to);
        }
      }
    }
    return seen;
  }

  std::vector<Arc> arcs;
  std::vector<std::vector<std::size_t>> adjacency;
};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

Kilograms edmonds_karp(Residual& g, std::size_t s, std::size_t t) {
  if (s == t) return 0;
  Kilograms total = 0;
  std::vector<std::size_t> parent_arc(g.adjacency.size());
  while (true) {
    std::fill(parent_arc.begin(), parent_arc.end(), kNone);
    std::queue<std::size_t> frontier;
    frontier.push(s);
    bool found = false;
    while (!frontier.empty() && !found) {
      const auto u = frontier.front();
      frontier.pop();
      for (auto a : g.adjacency[u]) {
        const auto v = g.arcs[a].to;
        if (g.arcs[a].residual <= 0 || v == s || parent_arc[v] != kNone) continue;
        parent_arc[v] = a;
        if (v == t) {
          found = true;
          break;
        }
        frontier.push(v);
      }
    }
    if (!found) return total;

    Kilograms bottleneck = std::numeric_limits<Kilograms>::max();
    for (auto v = t; v != s; v = g.arcs[parent_arc[v] ^ 1U].to) {
      bottleneck = std::min(bottleneck, g.arcs[parent_arc[v]].residual);
    }
    for (auto v = t; v != s; v = g.arcs[parent_arc[v] ^ 1U].to) g.push(parent_arc[v], bottleneck);
    total += bottleneck;
  }
}

}  // namespace

std::int64_t flow_cost_micros(const FlowNetwork& net, const std::vector<Kilograms>& flow) {
  std::int64_t total = 0;
  for (std::size_t k = 0; k < net.edges().size(); ++k) total += flow.at(k) * net.edges()[k].cost.micros;
  return total;
}

FlowAssignment max_flow(const FlowNetwork& net) {
  Residual g(net);
  FlowAssignment result;
  result.value = edmonds_karp(g, net.source(), net.sink());
  result.flow = g.edge_flows();
  result.cost_micros = flow_cost_micros(net, result.flow);
  return result;
}

FlowAssignment min_cost_flow(const FlowNetwork& net, Kilograms demand) {
  if (demand < 0) throw Error(Errc::infeasible_demand, "demand must be non-negative");
  Residual g(net);
  const auto n = g.adjacency.size();
  const auto s = net.source();
  const auto t = net.sink();
  constexpr auto kInf = std::numeric_limits<std::int64_t>::max();

  // Declared costs are non-negative, so zero potentials are valid initially.
  std::vector<std::int64_t> potential(n, 0);
  std::vector<std::int64_t> dist(n);
  std::vector<std::size_t> parent_arc(n);
  Kilograms remaining = demand;

  while (remaining > 0) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent_arc.begin(), parent_arc.end(), kNone);
    using Item = std::pair<std::int64_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s] = 0;
    heap.emplace(0, s);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d != dist[u]) continue;
      for (auto a : g.adjacency[u]) {
        const auto& arc = g.arcs[a];
        if (arc.residual <= 0) continue;
        const auto reduced = arc.cost + potential[u] - potential[arc.to];
        if (dist[u] + reduced < dist[arc.to]) {
          dist[arc.to] = dist[u] + reduced;
          parent_arc[arc.to] = a;
          heap.emplace(dist[arc.to], arc.to);
        }
      }
    }
    if (dist[t] == kInf) {
      throw Error(Errc::infeasible_demand, "demand of " + std::to_string(demand) +
                                               " kg exceeds the network's max flow of " +
                                               std::to_string(demand - remaining) + " kg");
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (dist[v] != kInf) potential[v] += dist[v];
    }

    Kilograms push = remaining;
    for (auto v = t; v != s; v = g.arcs[parent_arc[v] ^ 1U].to) {
      push = std::min(push, g.arcs[parent_arc[v]].residual);
    }
    for (auto v = t; v != s; v = g.arcs[parent_arc[v] ^ 1U].to) g.push(parent_arc[v], push);
    remaining -= push;
  }

  FlowAssignment result;
  result.value = demand;
  result.flow = g.edge_flows();
  result.cost_micros = flow_cost_micros(net, result.flow);
  return result;
}

MinCut min_cut(const FlowNetwork& net) {
  Residual g(net);
  edmonds_karp(g, net.source(), net.sink());
  const auto side = g.reachable_from(net.source());

  MinCut cut;
  for (std::size_t v = 0; v < side.size(); ++v) {
    if (side[v]) cut.source_side.push_back(net.id(v));
  }
  for (const auto& e : net.edges()) {
    if (side[e.from] && !side[e.to]) cut.capacity += e.capacity;
  }
  return cut;
}

std::optional<std::string> check_flow(const FlowNetwork& net, const FlowAssignment& assignment) {
  if (assignment.flow.size() != net.edges().size()) return "flow vector size mismatch";
  std::vector<Kilograms> balance(net.nodes().size(), 0);
  for (std::size_t k = 0; k < net.edges().size(); ++k) {
    const auto& e = net.edges()[k];
    const auto f = assignment.flow[k];
    if (f < 0 || f > e.capacity) {
      return "edge " + net.id(e.from) + "->" + net.id(e.to) + " carries " + std::to_string(f) +
             " outside [0, " + std::to_string(e.capacity) + "]";
    }
    balance[e.from] -= f;
    balance[e.to] += f;
  }
  for (std::size_t v = 0; v < balance.size(); ++v) {
    if (v == net.source() || v == net.sink()) continue;
    if (balance[v] != 0) return "conservation violated at '" + net.id(v) + "'";
  }
  if (net.source() != net.sink()) {
    if (-balance[net.source()] != assignment.value) return "value differs from source outflow";
    if (balance[net.sink()] != assignment.value) return "value differs from sink inflow";
  }
  return std::nullopt;
}

}  // namespace fabflow::netflow
