#pragma once

// Capacitated flow networks over the fab logistics graph: construction,
// max-flow (shortest augmenting paths), min-cost flow and min cut.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fabflow::netflow {

/// Mass in integer kilograms.
using Kilograms = std::int64_t;

/// Per-kg transport cost in fixed point (1e-6 currency units).
struct Cost {
  static constexpr std::int64_t kScale = 1'000'000;

  std::int64_t micros = 0;

  static Cost from_double(double value);
  double value() const { return static_cast<double>(micros) / kScale; }

  friend auto operator<=>(const Cost&, const Cost&) = default;
};

enum class NodeKind { source, production, logistics, destination, sink };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> parse_node_kind(std::string_view text);

/// Origins are Source and Production nodes; destinations are Destination and Sink nodes.
bool is_origin(NodeKind kind);
bool is_destination(NodeKind kind);

struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::logistics;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct EdgeSpec {
  std::string from;
  std::string to;
  Kilograms capacity = 0;
  Cost cost;
  double transit_time_h = 0.0;

  friend bool operator==(const EdgeSpec&, const EdgeSpec&) = default;
};

/// Declarative network description as it appears in a scenario file.
struct NetworkSpec {
  std::vector<NodeSpec> nodes;
  std::vector<EdgeSpec> edges;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

inline constexpr std::string_view kSyntheticSourceId = "__source__";
inline constexpr std::string_view kSyntheticSinkId = "__sink__";

/// Validated network with a single designated source and sink.
///
/// When a spec declares several origins (or destinations) a synthetic
/// super-source (super-sink) is appended and joined to each of them with a
/// zero-cost edge whose capacity exceeds the sum of all declared capacities.
class FlowNetwork {
 public:
  struct Node {
    std::string id;
    NodeKind kind;
    bool synthetic = false;
  };

  struct Edge {
    std::size_t from;
    std::size_t to;
    Kilograms capacity;
    Cost cost;
    double transit_time_h;
    bool synthetic = false;
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t source() const { return source_; }
  std::size_t sink() const { return sink_; }

  std::optional<std::size_t> find(std::string_view id) const;
  const std::string& id(std::size_t node) const { return nodes_.at(node).id; }

  std::size_t named_node_count() const;
  std::size_t declared_edge_count() const;

 private:
  friend FlowNetwork build_network(const NetworkSpec& spec);

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t source_ = 0;
  std::size_t sink_ = 0;
};

/// Flow per edge, aligned with FlowNetwork::edges().
struct FlowAssignment {
  std::vector<Kilograms> flow;
  Kilograms value = 0;
  std::int64_t cost_micros = 0;

  double cost() const { return static_cast<double>(cost_micros) / Cost::kScale; }
};

struct MinCut {
  std::vector<std::string> source_side;
  Kilograms capacity = 0;
};

/// Throws Error{duplicate_node | dangling_edge | invalid_edge | no_origin_or_destination}.
FlowNetwork build_network(const NetworkSpec& spec);

/// Edmonds-Karp; flows are integral.
FlowAssignment max_flow(const FlowNetwork& net);

/// Successive shortest paths with Johnson potentials. Throws
/// Error{infeasible_demand} when `demand` exceeds the max-flow value.
FlowAssignment min_cost_flow(const FlowNetwork& net, Kilograms demand);

/// Source side of a minimum cut (nodes reachable in the final residual graph).
MinCut min_cut(const FlowNetwork& net);

/// Total Σ flow·cost in fixed point.
std::int64_t flow_cost_micros(const FlowNetwork& net, const std::vector<Kilograms>& flow);

/// Empty when capacity bounds and conservation hold exactly and `value`
/// matches the source's net outflow; otherwise a description of the first violation.
std::optional<std::string> check_flow(const FlowNetwork& net, const FlowAssignment& assignment);

}  // namespace fabflow::netflow
