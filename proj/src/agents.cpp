#include "advsim/agents.hpp"

#include <algorithm>
#include <cmath>

#include "advsim/error.hpp"
#include "advsim/log.hpp"

namespace advsim {

Point step_toward(Point from, Point waypoint, double speed) {
  const double dx = waypoint.x - from.x;
  const double dy = waypoint.y - from.y;
  const double distance = std::sqrt(dx * dx + dy * dy);
  if (distance <= speed) return waypoint;
  const double scale = speed / distance;
  return {from.x + dx * scale, from.y + dy * scale};
}

Agent::Agent(std::size_t index, std::string name, AgentKind kind, NodeId start, const Node& start_node, MetaMap meta,
             Rng rng)
    : index_(index),
      name_(std::move(name)),
      kind_(kind),
      start_(start),
      current_(start),
      pose_{start_node.x, start_node.y, 0.0},
      meta_(std::move(meta)),
      rng_(rng) {
  if (const auto* aerial = std::get_if<AerialKind>(&kind_); aerial && !(aerial->speed > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "aerial agent '" + name_ + "' needs speed > 0");
  }
}

std::string Agent::team() const {
  auto it = meta_.find("team");
  if (it == meta_.end()) return {};
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return {};
}

void Agent::register_sensor(const std::string& sensor_name) {
  if (std::find(sensors_.begin(), sensors_.end(), sensor_name) == sensors_.end()) sensors_.push_back(sensor_name);
}

AgentState Agent::get_state(const SensorEngine& sensors, const Graph& graph,
                            const std::vector<std::pair<std::string, NodeId>>& agent_positions, std::uint64_t turn) {
  AgentState state;
  state.turn = turn;
  state.rng = &rng_;
  state.meta = &meta_;
  const SenseInput input{graph, agent_positions, current_, pose_.heading};
  for (const std::string& name : sensors_) state.readings.emplace(name, sensors.get(name).sense(input));
  return state;
}

Proposal Agent::set_state(const Graph& graph, const AgentState& state) const {
  Proposal proposal;
  proposal.agent = index_;
  proposal.from = current_;
  proposal.to = current_;
  proposal.destination = {pose_.x, pose_.y};

  if (const auto* aerial = std::get_if<AerialKind>(&kind_)) {
    proposal.aerial = true;
    std::optional<Point> waypoint;
    if (const auto* p = std::get_if<Point>(&state.action)) {
      if (std::isfinite(p->x) && std::isfinite(p->y)) waypoint = *p;
    } else if (const auto* node = std::get_if<NodeId>(&state.action)) {
      if (graph.has_node(*node)) waypoint = Point{graph.node(*node).x, graph.node(*node).y};
    } else {
      return proposal;
    }
    if (!waypoint) {
      log().warn("agent '{}' turn {}: invalid waypoint, staying", name_, state.turn);
      return proposal;
    }
    proposal.destination = step_toward({pose_.x, pose_.y}, *waypoint, aerial->speed);
    return proposal;
  }

  const auto* target = std::get_if<NodeId>(&state.action);
  if (target == nullptr) {
    if (std::holds_alternative<Point>(state.action)) {
      log().warn("agent '{}' turn {}: ground agents cannot take waypoints, staying", name_, state.turn);
    }
    return proposal;
  }
  if (*target == current_) return proposal;
  for (EdgeId e : graph.out_edges(current_)) {
    if (graph.edge(e).target == *target) {
      proposal.to = *target;
      return proposal;
    }
  }
  log().warn("agent '{}' turn {}: node {} is not adjacent to {}, staying", name_, state.turn, raw(*target),
             raw(current_));
  return proposal;
}

void Agent::place_at_node(NodeId node, const Node& coordinates, double heading) {
  current_ = node;
  pose_ = {coordinates.x, coordinates.y, heading};
}

void Agent::place_at_pose(Pose pose, NodeId nearest) {
  pose_ = pose;
  current_ = nearest;
}

Agent& AgentEngine::create_agent(const std::string& name, AgentKind kind, NodeId start, const Graph& graph,
                                 MetaMap meta, Rng rng) {
  if (by_name_.contains(name)) throw Error(ErrorKind::DuplicateAgentName, name);
  if (!graph.has_node(start)) {
    throw Error(ErrorKind::UnknownNode, "agent '" + name + "' start node " + std::to_string(raw(start)));
  }
  if (agents_.size() > UINT16_MAX) throw Error(ErrorKind::InvalidArgument, "too many agents for the recording format");
  agents_.emplace_back(agents_.size(), name, kind, start, graph.node(start), std::move(meta), rng);
  by_name_.emplace(name, agents_.size() - 1);
  return agents_.back();
}

Agent& AgentEngine::get(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error(ErrorKind::UnknownAgent, name);
  return agents_[it->second];
}

const Agent& AgentEngine::get(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error(ErrorKind::UnknownAgent, name);
  return agents_[it->second];
}

std::vector<std::pair<std::string, NodeId>> AgentEngine::positions() const {
  std::vector<std::pair<std::string, NodeId>> out;
  out.reserve(agents_.size());
  for (const Agent& a : agents_) out.emplace_back(a.name(), a.current_node());
  return out;
}

}  // namespace advsim
