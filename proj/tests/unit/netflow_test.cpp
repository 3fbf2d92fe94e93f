#include <gtest/gtest.h>

#include <random>

#include "fabflow/error.hpp"
#include "fabflow/fixtures.hpp"
#include "fabflow/netflow.hpp"
#include "oracles.hpp"

namespace fabflow::netflow {
namespace {

NetworkSpec diamond() {
  return {{{"s", NodeKind::source}, {"a", NodeKind::logistics}, {"b", NodeKind::logistics}, {"t", NodeKind::sink}},
          {{"s", "a", 10, {}, 0.0},
           {"s", "b", 10, {}, 0.0},
           {"a", "t", 10, {}, 0.0},
           {"b", "t", 10, {}, 0.0},
           {"a", "b", 1, {}, 0.0}}};
}

// The built network (synthetic nodes included) as an oracle graph.
oracle::SmallGraph as_small_graph(const FlowNetwork& net) {
  std::vector<int> order(net.nodes().size());
  int next = 1;
  for (std::size_t v = 0; v < net.nodes().size(); ++v) {
    if (v != net.source() && v != net.sink()) order[v] = next++;
  }
  order[net.source()] = 0;
  order[net.sink()] = next;
  oracle::SmallGraph g{next + 1, {}};
  for (const auto& e : net.edges()) {
    g.edges.push_back({order[e.from], order[e.to], e.capacity, e.cost.micros});
  }
  return g;
}

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::invalid_argument;
}

TEST(MaxFlow, DiamondValue) {
  const auto net = build_network(diamond());
  const auto flow = max_flow(net);
  EXPECT_EQ(flow.value, 20);
  EXPECT_FALSE(check_flow(net, flow).has_value());
  EXPECT_EQ(oracle::brute_force_min_cut(as_small_graph(net)), 20);
}

TEST(MaxFlow, ZeroCapacities) {
  auto spec = diamond();
  for (auto& e : spec.edges) e.capacity = 0;
  const auto flow = max_flow(build_network(spec));
  EXPECT_EQ(flow.value, 0);
  for (auto f : flow.flow) EXPECT_EQ(f, 0);
}

TEST(MaxFlow, FixtureDeltaIs6700) {
  const auto base = build_network(scenario::load_fixture("fig9_baseline").network);
  const auto optimized = build_network(scenario::load_fixture("fig10_optimized").network);
  EXPECT_EQ(max_flow(optimized).value - max_flow(base).value, 6700);
  EXPECT_EQ(optimized.declared_edge_count() - base.declared_edge_count(), 4u);
}

TEST(MaxFlow, RandomGraphsMatchEnumeratedFlows) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 150; ++trial) {
    const auto g = oracle::random_graph(rng, 2, 4, 3, 0.5);
    if (g.edges.size() > 7) continue;
    const auto flow = max_flow(build_network(oracle::to_spec(g)));
    ASSERT_EQ(flow.value, oracle::brute_force_max_flow(g)) << "trial " << trial;
  }
}

TEST(MaxFlow, AddingAnEdgeNeverDecreasesValue) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = oracle::random_graph(rng, 3, 7, 6, 0.35);
    const auto before = max_flow(build_network(oracle::to_spec(g))).value;
    std::uniform_int_distribution<int> node(0, g.nodes - 1);
    const int a = node(rng);
    const int b = node(rng);
    const bool exists = std::any_of(g.edges.begin(), g.edges.end(),
                                    [&](const auto& e) { return e.from == a && e.to == b; });
    if (a == b || exists) continue;
    g.edges.push_back({a, b, 1 + static_cast<std::int64_t>(rng() % 6), 0});
    EXPECT_GE(max_flow(build_network(oracle::to_spec(g))).value, before);
  }
}

TEST(MinCostFlow, ParallelPathsCost11) {
  // Parallel edges are rejected, so each path passes through its own relay.
  const NetworkSpec spec{{{"s", NodeKind::source}, {"x", NodeKind::logistics}, {"y", NodeKind::logistics},
                          {"t", NodeKind::sink}},
                         {{"s", "x", 5, Cost::from_double(1.0), 0.0},
                          {"x", "t", 5, {}, 0.0},
                          {"s", "y", 5, Cost::from_double(3.0), 0.0},
                          {"y", "t", 5, {}, 0.0}}};
  const auto flow = min_cost_flow(build_network(spec), 7);
  EXPECT_EQ(flow.value, 7);
  EXPECT_EQ(flow.cost_micros, 11 * Cost::kScale);
}

TEST(MinCostFlow, ZeroDemand) {
  const auto flow = min_cost_flow(build_network(diamond()), 0);
  EXPECT_EQ(flow.value, 0);
  EXPECT_EQ(flow.cost_micros, 0);
}

TEST(MinCostFlow, InfeasibleDemand) {
  const auto net = build_network(diamond());
  EXPECT_EQ(code_of([&] { (void)min_cost_flow(net, 21); }), Errc::infeasible_demand);
}

TEST(MinCostFlow, MatchesEnumerationOnSmallGraphs) {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 120; ++trial) {
    const auto g = oracle::random_graph(rng, 3, 4, 3, 0.5, 5);
    if (g.edges.empty() || g.edges.size() > 6) continue;
    const auto net = build_network(oracle::to_spec(g));
    const auto value = max_flow(net).value;
    for (std::int64_t d = 0; d <= value; ++d) {
      const auto flow = min_cost_flow(net, d);
      ASSERT_FALSE(check_flow(net, flow).has_value());
      ASSERT_EQ(flow.cost_micros, oracle::brute_force_min_cost(g, d).value()) << "trial " << trial << " d " << d;
    }
    ++checked;
  }
  EXPECT_GE(checked, 100);
}

TEST(MinCostFlow, CostMonotoneInDemand) {
  const auto net = build_network(scenario::load_fixture("fig9_baseline").network);
  std::int64_t last = -1;
  for (Kilograms d = 0; d <= 20000; d += 500) {
    const auto cost = min_cost_flow(net, d).cost_micros;
    EXPECT_GE(cost, last);
    last = cost;
  }
}

TEST(MinCut, DualityOnRandomGraphs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = oracle::random_graph(rng, 2, 7, 6, 0.4);
    const auto net = build_network(oracle::to_spec(g));
    const auto cut = min_cut(net);
    EXPECT_EQ(cut.capacity, max_flow(net).value);
    EXPECT_EQ(cut.capacity, oracle::brute_force_min_cut(g));
  }
}

TEST(MinCut, Disconnected) {
  const NetworkSpec spec{{{"s", NodeKind::source}, {"a", NodeKind::logistics}, {"t", NodeKind::sink}},
                         {{"s", "a", 4, {}, 0.0}}};
  const auto cut = min_cut(build_network(spec));
  EXPECT_EQ(cut.capacity, 0);
  EXPECT_EQ(cut.source_side, (std::vector<std::string>{"s", "a"}));
}

TEST(MinCut, BaselineFixtureMatchesBipartitionOracle) {
  const auto net = build_network(scenario::load_fixture("fig9_baseline").network);
  const auto cut = min_cut(net);
  EXPECT_EQ(cut.capacity, max_flow(net).value);
  EXPECT_EQ(cut.capacity, oracle::brute_force_min_cut(as_small_graph(net)));
}

TEST(BuildNetwork, BaselineHasNineNamedAndTwoSyntheticNodes) {
  const auto net = build_network(scenario::load_fixture("fig9_baseline").network);
  EXPECT_EQ(net.named_node_count(), 9u);
  EXPECT_EQ(net.nodes().size(), 11u);
  EXPECT_EQ(net.id(net.source()), kSyntheticSourceId);
  EXPECT_EQ(net.id(net.sink()), kSyntheticSinkId);
}

TEST(BuildNetwork, SingleOriginAndDestinationAddNothing) {
  const auto net = build_network(diamond());
  EXPECT_EQ(net.nodes().size(), 4u);
  EXPECT_EQ(net.id(net.source()), "s");
  EXPECT_EQ(net.id(net.sink()), "t");
}

TEST(BuildNetwork, Errors) {
  auto dangling = diamond();
  dangling.edges.push_back({"a", "X9", 1, {}, 0.0});
  try {
    (void)build_network(dangling);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dangling_edge);
    EXPECT_NE(std::string(e.what()).find("X9"), std::string::npos);
  }

  auto duplicate = diamond();
  duplicate.nodes.push_back({"a", NodeKind::logistics});
  EXPECT_EQ(code_of([&] { (void)build_network(duplicate); }), Errc::duplicate_node);

  auto no_sink = diamond();
  no_sink.nodes[3].kind = NodeKind::logistics;
  EXPECT_EQ(code_of([&] { (void)build_network(no_sink); }), Errc::no_origin_or_destination);

  auto parallel = diamond();
  parallel.edges.push_back({"s", "a", 3, {}, 0.0});
  EXPECT_EQ(code_of([&] { (void)build_network(parallel); }), Errc::invalid_edge);
}

}  // namespace
}  // namespace fabflow::netflow
