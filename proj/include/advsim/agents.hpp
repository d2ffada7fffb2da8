#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "advsim/graph.hpp"
#include "advsim/rng.hpp"
#include "advsim/sensors.hpp"

namespace advsim {

struct GroundKind {
  friend bool operator==(const GroundKind&, const GroundKind&) = default;
};
struct AerialKind {
  double speed = 1.0;  // meters per turn
  friend bool operator==(const AerialKind&, const AerialKind&) = default;
};
using AgentKind = std::variant<GroundKind, AerialKind>;

/// No move this turn.
struct Stay {
  friend bool operator==(const Stay&, const Stay&) = default;
};
/// Ground agents propose a node; aerial agents a planar waypoint (a node id
/// is accepted too and means that node's coordinates).
using Action = std::variant<Stay, NodeId, Point>;

struct AgentState {
  std::map<std::string, SensorReading> readings;
  Action action = Stay{};
  std::uint64_t turn = 0;
  /// The agent's own random stream, split from the context generator.
  Rng* rng = nullptr;
  /// Read-only agent attributes (team, targets, ...).
  const MetaMap* meta = nullptr;

  friend bool operator==(const AgentState& a, const AgentState& b) {
    return a.readings == b.readings && a.action == b.action && a.turn == b.turn;
  }
};

using Strategy = std::function<void(AgentState&)>;

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// A movement proposal awaiting conflict resolution. Ground proposals carry
/// from/to nodes; aerial ones carry the capped destination.
struct Proposal {
  std::size_t agent = 0;
  bool aerial = false;
  NodeId from{};
  NodeId to{};
  Point destination;

  bool moves() const { return aerial ? true : from != to; }
  friend bool operator==(const Proposal&, const Proposal&) = default;
};

class Agent {
 public:
  Agent(std::size_t index, std::string name, AgentKind kind, NodeId start, const Node& start_node, MetaMap meta,
        Rng rng);

  std::size_t index() const { return index_; }
  const std::string& name() const { return name_; }
  const AgentKind& kind() const { return kind_; }
  bool is_aerial() const { return std::holds_alternative<AerialKind>(kind_); }
  NodeId start_node() const { return start_; }
  /// Ground: the occupied node. Aerial: nearest node to the pose.
  NodeId current_node() const { return current_; }
  const Pose& pose() const { return pose_; }
  std::string team() const;
  const MetaMap& meta() const { return meta_; }
  const std::vector<std::string>& sensors() const { return sensors_; }

  /// Idempotent; the engine checks the sensor exists.
  void register_sensor(const std::string& sensor_name);
  /// An empty strategy marks the agent human-controlled.
  void register_strategy(Strategy strategy) { strategy_ = std::move(strategy); }
  const Strategy& strategy() const { return strategy_; }
  bool is_human() const { return !strategy_; }

  /// Senses every registered sensor in registration order.
  AgentState get_state(const SensorEngine& sensors, const Graph& graph,
                       const std::vector<std::pair<std::string, NodeId>>& agent_positions, std::uint64_t turn);

  /// Validates the action and turns it into a proposal; nothing is committed.
  /// Invalid ground actions degrade to staying with a warning.
  Proposal set_state(const Graph& graph, const AgentState& state) const;

  // Mutation is reserved for the context's event application.
  void place_at_node(NodeId node, const Node& coordinates, double heading);
  void place_at_pose(Pose pose, NodeId nearest);

  Rng& rng() { return rng_; }

 private:
  std::size_t index_;
  std::string name_;
  AgentKind kind_;
  NodeId start_;
  NodeId current_;
  Pose pose_;
  MetaMap meta_;
  std::vector<std::string> sensors_;
  Strategy strategy_;
  Rng rng_;
};

/// Agents in creation order with name lookup.
class AgentEngine {
 public:
  Agent& create_agent(const std::string& name, AgentKind kind, NodeId start, const Graph& graph, MetaMap meta,
                      Rng rng);
  Agent& get(const std::string& name);
  const Agent& get(const std::string& name) const;
  bool contains(const std::string& name) const { return by_name_.contains(name); }
  Agent& at(std::size_t index) { return agents_.at(index); }
  const Agent& at(std::size_t index) const { return agents_.at(index); }
  std::size_t size() const { return agents_.size(); }

  std::vector<Agent>& all() { return agents_; }
  const std::vector<Agent>& all() const { return agents_; }

  std::vector<std::pair<std::string, NodeId>> positions() const;

 private:
  std::vector<Agent> agents_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Straight-line step toward the waypoint, at most `speed` long.
Point step_toward(Point from, Point waypoint, double speed);

}  // namespace advsim
