#include <cmath>

#include "advsim/context.hpp"
#include "advsim/scenarios.hpp"
#include "helpers.hpp"

using namespace advsim;

namespace {

struct World {
  Context ctx;
  World(std::size_t n = 5) { create_grid(ctx.graph(), n); }
  AgentState state(const std::string& name) {
    return ctx.agents().get(name).get_state(ctx.sensors(), ctx.graph(), ctx.agents().positions(), ctx.turn() + 1);
  }
};

}  // namespace

TEST(Agents, CreateGround) {
  World w;
  const Agent& a = w.ctx.create_agent("agent_0", GroundKind{}, NodeId{0});
  EXPECT_EQ(a.current_node(), NodeId{0});
  EXPECT_EQ(a.start_node(), NodeId{0});
  EXPECT_TRUE(a.sensors().empty());
  EXPECT_TRUE(a.is_human());
  EXPECT_ERROR_KIND(w.ctx.create_agent("agent_0", GroundKind{}, NodeId{1}), DuplicateAgentName);
  EXPECT_ERROR_KIND(w.ctx.create_agent("far", GroundKind{}, NodeId{999}), UnknownNode);
}

TEST(Agents, CreateAerialAtNodeCoordinates) {
  World w;
  const Agent& a = w.ctx.create_agent("aerial", AerialKind{1.0}, NodeId{6});
  EXPECT_TRUE(a.is_aerial());
  EXPECT_EQ(a.pose().x, 20.0);
  EXPECT_EQ(a.pose().y, 20.0);
}

TEST(Agents, TeamFromMeta) {
  World w;
  w.ctx.create_agent("r", GroundKind{}, NodeId{0}, {{"team", std::string("red")}});
  EXPECT_EQ(w.ctx.agents().get("r").team(), "red");
}

TEST(Agents, RegisterSensorIdempotent) {
  World w;
  w.ctx.create_sensor("nbr", NeighborSensor{});
  w.ctx.create_agent("a", GroundKind{}, NodeId{12});
  w.ctx.register_sensor("a", "nbr");
  w.ctx.register_sensor("a", "nbr");
  EXPECT_EQ(w.ctx.agents().get("a").sensors().size(), 1u);
  EXPECT_ERROR_KIND(w.ctx.register_sensor("a", "ghost"), UnknownSensor);
  const AgentState s = w.state("a");
  ASSERT_TRUE(s.readings.contains("nbr"));
  EXPECT_EQ(std::get<NeighborReading>(s.readings.at("nbr")).nodes.size(), 5u);
}

TEST(Agents, GetStatePure) {
  World w;
  w.ctx.create_agent("a", GroundKind{}, NodeId{0});
  const AgentState s = w.state("a");
  EXPECT_TRUE(s.readings.empty());
  EXPECT_EQ(s.turn, 1u);
  EXPECT_EQ(s.action, Action{Stay{}});
  EXPECT_EQ(w.state("a"), s);
}

TEST(Agents, SetStateValidatesGroundMoves) {
  World w;
  w.ctx.create_agent("a", GroundKind{}, NodeId{0});
  const Agent& a = w.ctx.agents().get("a");
  AgentState s = w.state("a");
  s.action = NodeId{1};
  Proposal p = a.set_state(w.ctx.graph(), s);
  EXPECT_EQ(p.from, NodeId{0});
  EXPECT_EQ(p.to, NodeId{1});
  s.action = NodeId{7};
  p = a.set_state(w.ctx.graph(), s);
  EXPECT_EQ(p.to, NodeId{0});
  s.action = Point{3, 3};
  EXPECT_EQ(a.set_state(w.ctx.graph(), s).to, NodeId{0});
  s.action = NodeId{0};
  EXPECT_FALSE(a.set_state(w.ctx.graph(), s).moves());
}

TEST(Agents, AerialSpeedCap) {
  EXPECT_EQ(step_toward({0, 0}, {10, 0}, 1.0), (Point{1, 0}));
  EXPECT_EQ(step_toward({0, 0}, {0.5, 0}, 1.0), (Point{0.5, 0}));
  Rng rng(12);
  for (int i = 0; i < 10000; ++i) {
    const Point from{rng.uniform01() * 100, rng.uniform01() * 100};
    const Point to{rng.uniform01() * 100, rng.uniform01() * 100};
    const double speed = 0.1 + rng.uniform01() * 20;
    const Point got = step_toward(from, to, speed);
    ASSERT_LE(std::hypot(got.x - from.x, got.y - from.y), speed * (1 + 1e-12));
    // Collinear with the waypoint direction.
    const double cross = (got.x - from.x) * (to.y - from.y) - (got.y - from.y) * (to.x - from.x);
    ASSERT_NEAR(cross, 0, 1e-9 * (1 + std::hypot(to.x - from.x, to.y - from.y) * speed));
  }
}

TEST(Agents, AerialMovesThroughStep) {
  World w;
  w.ctx.create_agent("aerial", AerialKind{1.0}, NodeId{0});
  w.ctx.register_strategy("aerial", [](AgentState& s) { s.action = Point{10, 0}; });
  w.ctx.step();
  const Pose& p = w.ctx.agents().get("aerial").pose();
  EXPECT_EQ(p.x, 1.0);
  EXPECT_EQ(p.y, 0.0);
  EXPECT_EQ(w.ctx.agents().get("aerial").current_node(), NodeId{0});
}

TEST(Agents, OnlyActionMatters) {
  auto run = [](bool scribble) {
    World w;
    w.ctx.create_sensor("nbr", NeighborSensor{});
    w.ctx.create_agent("a", GroundKind{}, NodeId{12});
    w.ctx.register_sensor("a", "nbr");
    w.ctx.register_strategy("a", [scribble](AgentState& s) {
      random_neighbor_strategy(s);
      if (scribble) {
        s.readings.clear();
        s.turn = 999;
      }
    });
    for (int i = 0; i < 20; ++i) w.ctx.step();
    return w.ctx.state_hash();
  };
  EXPECT_EQ(run(false), run(true));
}

TEST(Agents, CreationOrderIteration) {
  World w;
  for (const char* n : {"zeta", "alpha", "mid"}) w.ctx.create_agent(n, GroundKind{}, NodeId{0});
  std::vector<std::string> names;
  for (const Agent& a : w.ctx.agents().all()) names.push_back(a.name());
  EXPECT_EQ(names, (std::vector<std::string>{"zeta", "alpha", "mid"}));
}
