#include "advsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <queue>
#include <set>

#include "advsim/error.hpp"
#include "advsim/log.hpp"

namespace advsim {

void create_grid(Graph& graph, std::size_t n, double spacing) {
  if (graph.node_count() != 0) throw Error(ErrorKind::NonEmptyGraph, "create_grid needs an empty graph");
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "grid size must be at least 1");
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  auto id = [n](std::size_t i, std::size_t j) { return NodeId{i * n + j}; };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      graph.add_node({id(i, j), static_cast<double>(j) * spacing, static_cast<double>(i) * spacing, {}});
    }
  }
  std::uint64_t next = 0;
  auto link = [&](NodeId a, NodeId b) {
    const Node& s = graph.node(a);
    const Node& t = graph.node(b);
    graph.add_edge({EdgeId{next++}, a, b, spacing, {{s.x, s.y}, {t.x, t.y}}});
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j + 1 < n) {
        link(id(i, j), id(i, j + 1));
        link(id(i, j + 1), id(i, j));
      }
      if (i + 1 < n) {
        link(id(i, j), id(i + 1, j));
        link(id(i + 1, j), id(i, j));
      }
    }
  }
}

namespace {

std::vector<std::size_t> ground_members(const Context& ctx, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const std::string& name : names) {
    const Agent& agent = ctx.agents().get(name);
    if (!agent.is_aerial()) out.push_back(agent.index());
  }
  return out;
}

std::string territory_of(const Graph& graph, NodeId node) {
  const auto& meta = graph.node(node).meta;
  auto it = meta.find("territory");
  if (it == meta.end()) return {};
  const auto* team = std::get_if<std::string>(&it->second);
  return team ? *team : std::string{};
}

}  // namespace

std::optional<Termination> tag_rule(Context& ctx, const TagParams& params) {
  const auto red = ground_members(ctx, params.red);
  const auto blue = ground_members(ctx, params.blue);
  std::set<std::size_t> reset;
  for (std::size_t r : red) {
    for (std::size_t b : blue) {
      const NodeId node = ctx.agents().at(r).current_node();
      if (node != ctx.agents().at(b).current_node()) continue;
      const std::string owner = params.territorial ? territory_of(ctx.graph(), node) : std::string{};
      if (owner != "blue") reset.insert(b);
      if (owner != "red") reset.insert(r);
    }
  }
  for (std::size_t index : reset) {
    const Agent& agent = ctx.agents().at(index);
    log().debug("turn {}: tagged '{}'", ctx.turn(), agent.name());
    ctx.reset_agent(index, agent.start_node());
  }
  return std::nullopt;
}

std::optional<Termination> flag_capture_rule(Context& ctx, const FlagParams& params) {
  auto any_on = [&](const std::vector<std::string>& team, NodeId flag) {
    for (std::size_t i : ground_members(ctx, team)) {
      if (ctx.agents().at(i).current_node() == flag) return true;
    }
    return false;
  };
  const bool red_captures = any_on(params.red, params.blue_flag);
  const bool blue_captures = any_on(params.blue, params.red_flag);
  if (red_captures && blue_captures) return Termination{"draw"};
  if (red_captures) return Termination{"red"};
  if (blue_captures) return Termination{"blue"};
  return std::nullopt;
}

Rule make_tag_rule(TagParams params, int priority) {
  return {"tag", priority, [p = std::move(params)](Context& ctx, std::uint64_t) { return tag_rule(ctx, p); }};
}

Rule make_flag_capture_rule(FlagParams params, int priority) {
  return {"flag_capture", priority,
          [p = std::move(params)](Context& ctx, std::uint64_t) { return flag_capture_rule(ctx, p); }};
}

Rule make_max_turns_rule(std::uint64_t limit, int priority) {
  return {"max_turns", priority, [limit](Context&, std::uint64_t turn) -> std::optional<Termination> {
            if (turn >= limit) return Termination{};
            return std::nullopt;
          }};
}

namespace {

const NeighborReading& neighbor_reading(const AgentState& state) {
  for (const auto& [name, reading] : state.readings) {
    if (const auto* n = std::get_if<NeighborReading>(&reading)) return *n;
  }
  throw Error(ErrorKind::MissingSensor, "strategy needs a NEIGHBOR reading");
}

Rng& state_rng(AgentState& state) {
  if (!state.rng) throw Error(ErrorKind::InvalidArgument, "agent state has no random stream");
  return *state.rng;
}

}  // namespace

void random_neighbor_strategy(AgentState& state) {
  const NeighborReading& reading = neighbor_reading(state);
  if (reading.nodes.empty()) {
    state.action = Stay{};
    return;
  }
  state.action = reading.nodes[state_rng(state).uniform_index(reading.nodes.size())];
}

void stay_strategy(AgentState& state) { state.action = Stay{}; }

std::map<NodeId, std::uint64_t> distances_to(const Graph& graph, NodeId target) {
  if (!graph.has_node(target)) throw Error(ErrorKind::UnknownNode, std::to_string(raw(target)));
  std::map<NodeId, std::vector<NodeId>> incoming;
  for (const auto& [id, edge] : graph.edges()) incoming[edge.target].push_back(edge.source);
  std::map<NodeId, std::uint64_t> dist{{target, 0}};
  std::deque<NodeId> frontier{target};
  while (!frontier.empty()) {
    const NodeId at = frontier.front();
    frontier.pop_front();
    for (NodeId prev : incoming[at]) {
      if (dist.emplace(prev, dist[at] + 1).second) frontier.push_back(prev);
    }
  }
  return dist;
}

Strategy seek_strategy(const Graph& graph, NodeId target, double noise) {
  auto dist = std::make_shared<const std::map<NodeId, std::uint64_t>>(distances_to(graph, target));
  return [dist, noise](AgentState& state) {
    const NeighborReading& reading = neighbor_reading(state);
    Rng& rng = state_rng(state);
    if (reading.nodes.empty()) return;
    if (rng.uniform01() < noise) {
      state.action = reading.nodes[rng.uniform_index(reading.nodes.size())];
      return;
    }
    constexpr auto kFar = std::numeric_limits<std::uint64_t>::max();
    auto distance = [&](NodeId n) {
      auto it = dist->find(n);
      return it == dist->end() ? kFar : it->second;
    };
    std::vector<NodeId> best;
    std::uint64_t best_distance = kFar;
    for (NodeId n : reading.nodes) {
      const std::uint64_t d = distance(n);
      if (d < best_distance) {
        best_distance = d;
        best.clear();
      }
      if (d == best_distance) best.push_back(n);
    }
    state.action = best.size() == 1 ? best.front() : best[rng.uniform_index(best.size())];
  };
}

Strategy patrol_strategy(const Graph& graph, std::string self, std::vector<NodeId> waypoints) {
  if (waypoints.empty()) throw Error(ErrorKind::InvalidArgument, "patrol needs at least one waypoint");
  for (NodeId w : waypoints) {
    if (!graph.has_node(w)) throw Error(ErrorKind::UnknownNode, std::to_string(raw(w)));
  }
  auto next = std::make_shared<std::size_t>(0);
  return [self = std::move(self), waypoints = std::move(waypoints), next](AgentState& state) {
    const AgentReading* seen = nullptr;
    for (const auto& [name, reading] : state.readings) {
      if ((seen = std::get_if<AgentReading>(&reading))) break;
    }
    if (!seen) throw Error(ErrorKind::MissingSensor, "patrol needs an AGENT reading");
    auto it = seen->positions.find(self);
    if (it != seen->positions.end() && it->second == waypoints[*next]) *next = (*next + 1) % waypoints.size();
    state.action = waypoints[*next];
  };
}

std::map<NodeId, std::string> voronoi_territories(const Graph& graph, NodeId red_flag, NodeId blue_flag) {
  auto dijkstra = [&](NodeId source) {
    std::map<NodeId, double> dist{{source, 0.0}};
    using Item = std::pair<double, std::uint64_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    queue.push({0.0, raw(source)});
    while (!queue.empty()) {
      const auto [d, at] = queue.top();
      queue.pop();
      if (d > dist[NodeId{at}]) continue;
      for (const Neighbor& n : graph.neighbors(NodeId{at})) {
        const double nd = d + graph.edge(n.edge).length;
        auto [it, fresh] = dist.emplace(n.target, nd);
        if (fresh || nd < it->second) {
          it->second = nd;
          queue.push({nd, raw(n.target)});
        }
      }
    }
    return dist;
  };
  if (!graph.has_node(red_flag)) throw Error(ErrorKind::UnknownNode, "red flag " + std::to_string(raw(red_flag)));
  if (!graph.has_node(blue_flag)) throw Error(ErrorKind::UnknownNode, "blue flag " + std::to_string(raw(blue_flag)));
  const auto red = dijkstra(red_flag);
  const auto blue = dijkstra(blue_flag);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::map<NodeId, std::string> out;
  for (const auto& [id, node] : graph.nodes()) {
    auto r = red.find(id);
    auto b = blue.find(id);
    const double dr = r == red.end() ? kInf : r->second;
    const double db = b == blue.end() ? kInf : b->second;
    if (dr < db) out.emplace(id, "red");
    else if (db < dr) out.emplace(id, "blue");
  }
  return out;
}

void assign_territories(Graph& graph, const std::map<NodeId, std::string>& territories) {
  for (const auto& [id, team] : territories) graph.set_node_meta(id, "territory", team);
}

void add_flag_artist(VisualEngine& visual, NodeId red_flag, NodeId blue_flag) {
  Artist artist;
  artist.layer = 35;
  artist.data = {{"red_id", raw(red_flag)}, {"blue_id", raw(blue_flag)}};
  artist.drawer = [](Context& ctx, const nlohmann::json& data) {
    const Node& blue = ctx.graph().node(NodeId{data.at("blue_id").get<std::uint64_t>()});
    const Node& red = ctx.graph().node(NodeId{data.at("red_id").get<std::uint64_t>()});
    ctx.visual().render_rectangle(blue.x, blue.y, 10, 10, {0, 0, 255});
    ctx.visual().render_rectangle(red.x, red.y, 10, 10, {255, 0, 0});
  };
  visual.remove_artist("flags");
  visual.add_artist("flags", std::move(artist));
}

}  // namespace advsim
