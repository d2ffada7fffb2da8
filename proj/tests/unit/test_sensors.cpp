#include <cmath>
#include <numbers>
#include <set>

#include "advsim/context.hpp"
#include "advsim/scenarios.hpp"
#include "advsim/sensors.hpp"
#include "helpers.hpp"

using namespace advsim;

namespace {

const std::vector<std::pair<std::string, NodeId>> kNoAgents;

SensorReading sense(const Sensor& s, const Graph& g, NodeId at, double heading = 0) {
  return s.sense({g, kNoAgents, at, heading});
}

Graph star(std::vector<Point> points) {
  Graph g;
  g.add_node({NodeId{0}, 0, 0, {}});
  std::uint64_t id = 1;
  for (const Point& p : points) g.add_node({NodeId{id++}, p.x, p.y, {}});
  return g;
}

std::set<NodeId> brute_range(const Graph& g, NodeId at, double range) {
  const Node& o = g.node(at);
  std::set<NodeId> out;
  for (const auto& [id, n] : g.nodes()) {
    const double dx = n.x - o.x;
    const double dy = n.y - o.y;
    if (dx * dx + dy * dy <= range * range) out.insert(id);
  }
  return out;
}

}  // namespace

TEST(Sensors, CreateAndDuplicates) {
  SensorEngine engine;
  engine.create_sensor("nbr", NeighborSensor{});
  engine.create_sensor("camera", ArcSensor{50, 2.5});
  EXPECT_EQ(engine.get("camera").type(), SensorType::Arc);
  EXPECT_ERROR_KIND(engine.create_sensor("nbr", MapSensor{}), DuplicateSensorName);
  EXPECT_ERROR_KIND(engine.get("missing"), UnknownSensor);
  EXPECT_ERROR_KIND(engine.create_sensor("bad", ArcSensor{0, 1}), InvalidArgument);
  EXPECT_ERROR_KIND(engine.create_sensor("wide", ArcSensor{10, 7}), InvalidArgument);
}

TEST(Sensors, NeighborIsolatedAndGrid) {
  Graph g = star({});
  Sensor nbr("nbr", NeighborSensor{});
  EXPECT_EQ(std::get<NeighborReading>(sense(nbr, g, NodeId{0})).nodes, std::vector<NodeId>{NodeId{0}});
  Graph grid;
  create_grid(grid, 5);
  EXPECT_EQ(std::get<NeighborReading>(sense(nbr, grid, NodeId{12})).nodes.size(), 5u);
  EXPECT_ERROR_KIND(sense(nbr, grid, NodeId{99}), UnknownNode);
}

TEST(Sensors, ArcRangeBoundary) {
  Graph g = star({{30, 0}, {49.9, 0}, {50.1, 0}});
  Sensor arc("camera", ArcSensor{50, 2 * std::numbers::pi});
  EXPECT_EQ(std::get<ArcReading>(sense(arc, g, NodeId{0})).nodes,
            (std::vector<NodeId>{NodeId{0}, NodeId{1}, NodeId{2}}));
}

TEST(Sensors, ArcAngularWindow) {
  const double r = 10;
  const double a44 = 44 * std::numbers::pi / 180;
  const double a46 = 46 * std::numbers::pi / 180;
  Graph g = star({{r * std::cos(a44), r * std::sin(a44)}, {r * std::cos(a46), r * std::sin(a46)}});
  Sensor arc("camera", ArcSensor{50, std::numbers::pi / 2});
  EXPECT_EQ(std::get<ArcReading>(sense(arc, g, NodeId{0}, 0)).nodes, (std::vector<NodeId>{NodeId{0}, NodeId{1}}));
}

TEST(Sensors, ArcEdgesNeedBothEndpoints) {
  Graph g = star({{10, 0}, {100, 0}});
  g.add_edge(testutil::straight(g, 0, 0, 1));
  g.add_edge(testutil::straight(g, 1, 1, 2));
  g.add_edge(testutil::straight(g, 2, 1, 0));
  const ArcReading r = std::get<ArcReading>(sense(Sensor("c", ArcSensor{50, 1}), g, NodeId{0}));
  EXPECT_EQ(r.edges, (std::vector<EdgeId>{EdgeId{0}, EdgeId{2}}));
}

TEST(Sensors, CustomInjection) {
  SensorEngine engine;
  engine.create_sensor("radio", CustomSensor{"radio"});
  engine.create_sensor("camera", ArcSensor{50, 2.5});
  Graph g = star({});
  EXPECT_TRUE(std::get<CustomReading>(sense(engine.get("radio"), g, NodeId{0})).payload.is_null());
  engine.inject("radio", {{"enemy", 4}});
  EXPECT_EQ(std::get<CustomReading>(sense(engine.get("radio"), g, NodeId{0})).payload["enemy"], 4);
  EXPECT_ERROR_KIND(engine.inject("camera", 1), KindMismatch);
  EXPECT_ERROR_KIND(engine.inject("nope", 1), UnknownSensor);
}

TEST(Sensors, MapIsSnapshot) {
  Graph g = star({{10, 0}});
  Sensor map("map", MapSensor{});
  const MapReading before = std::get<MapReading>(sense(map, g, NodeId{0}));
  EXPECT_EQ(before.graph->node_count(), 2u);
  g.add_node({NodeId{5}, 1, 1, {}});
  EXPECT_EQ(before.graph->node_count(), 2u);
  EXPECT_EQ(std::get<MapReading>(sense(map, g, NodeId{0})).graph->node_count(), 3u);
}

TEST(Sensors, AgentPositions) {
  Graph g = star({{10, 0}});
  const std::vector<std::pair<std::string, NodeId>> positions{{"a", NodeId{0}}, {"b", NodeId{1}}};
  const auto r = std::get<AgentReading>(Sensor("ag", AgentSensor{}).sense({g, positions, NodeId{0}, 0}));
  EXPECT_EQ(r.positions.at("b"), NodeId{1});
}

TEST(Sensors, FullCircleArcMatchesRangeOracle) {
  Rng rng(99);
  for (int round = 0; round < 30; ++round) {
    const Graph g = testutil::random_graph(rng, 50 + rng.uniform_index(200));
    const Sensor arc("c", ArcSensor{60, 2 * std::numbers::pi});
    for (int k = 0; k < 5; ++k) {
      auto it = g.nodes().begin();
      std::advance(it, static_cast<long>(rng.uniform_index(g.node_count())));
      const ArcReading r = std::get<ArcReading>(sense(arc, g, it->first, rng.uniform01() * 6));
      const std::set<NodeId> expected = brute_range(g, it->first, 60);
      ASSERT_EQ(std::set<NodeId>(r.nodes.begin(), r.nodes.end()), expected);
      std::vector<EdgeId> edges;
      for (const auto& [eid, e] : g.edges()) {
        if (expected.contains(e.source) && expected.contains(e.target)) edges.push_back(eid);
      }
      ASSERT_EQ(r.edges, edges);
    }
  }
}

TEST(Sensors, ArcMonotoneInRange) {
  Rng rng(7);
  for (int round = 0; round < 30; ++round) {
    const Graph g = testutil::random_graph(rng, 80);
    const NodeId at = g.nodes().begin()->first;
    const double heading = rng.uniform01() * 6;
    const double fov = 0.2 + rng.uniform01() * 6;
    const double r1 = rng.uniform01() * 200;
    const double r2 = r1 + rng.uniform01() * 100;
    const auto small = std::get<ArcReading>(sense(Sensor("a", ArcSensor{r1 + 1e-9, fov}), g, at, heading)).nodes;
    const auto large = std::get<ArcReading>(sense(Sensor("b", ArcSensor{r2 + 1e-9, fov}), g, at, heading)).nodes;
    ASSERT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
}

TEST(Sensors, SensingLeavesStateUntouched) {
  Context ctx;
  create_grid(ctx.graph(), 6);
  ctx.create_sensor("nbr", NeighborSensor{});
  ctx.create_sensor("cam", ArcSensor{50, 2.5});
  ctx.create_sensor("map", MapSensor{});
  ctx.create_agent("a", GroundKind{}, NodeId{7});
  for (const char* s : {"nbr", "cam", "map"}) ctx.register_sensor("a", s);
  const std::uint64_t before = ctx.state_hash();
  const std::uint64_t version = ctx.graph().version();
  ctx.agents().get("a").get_state(ctx.sensors(), ctx.graph(), ctx.agents().positions(), 1);
  EXPECT_EQ(ctx.state_hash(), before);
  EXPECT_EQ(ctx.graph().version(), version);
}
