#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "advsim/context.hpp"

namespace advsim {

inline constexpr double kGridSpacing = 20.0;

/// n x n lattice, node id i*n + j at (j*spacing, i*spacing), 4-connected with
/// both edge directions. Edge ids run in insertion order from 0.
void create_grid(Graph& graph, std::size_t n, double spacing = kGridSpacing);

struct TagParams {
  std::vector<std::string> red;
  std::vector<std::string> blue;
  /// Reset only the intruder, judged by the node's "territory" meta value.
  bool territorial = false;
};

/// Resets tagged agents to their start nodes through AgentReset events.
/// Aerial agents are never tagged. Never terminates.
std::optional<Termination> tag_rule(Context& ctx, const TagParams& params);

struct FlagParams {
  NodeId red_flag{};
  NodeId blue_flag{};
  std::vector<std::string> red;
  std::vector<std::string> blue;
};

/// A ground member on the opposing flag wins; both teams at once is "draw".
std::optional<Termination> flag_capture_rule(Context& ctx, const FlagParams& params);

Rule make_tag_rule(TagParams params, int priority = 0);
Rule make_flag_capture_rule(FlagParams params, int priority = 10);
Rule make_max_turns_rule(std::uint64_t limit, int priority = 20);

/// Picks a uniform element of the first NEIGHBOR reading (self included).
/// Throws MissingSensor without one.
void random_neighbor_strategy(AgentState& state);

/// Stays put.
void stay_strategy(AgentState& state);

/// Moves one hop along a shortest path to `target`; with probability `noise`
/// moves to a random neighbor instead. Needs a NEIGHBOR reading.
Strategy seek_strategy(const Graph& graph, NodeId target, double noise);

/// Aerial tour over node waypoints. Advances when the AGENT reading puts
/// `self` at the current waypoint.
Strategy patrol_strategy(const Graph& graph, std::string self, std::vector<NodeId> waypoints);

/// Hop distance from every node to `target` along directed edges.
std::map<NodeId, std::uint64_t> distances_to(const Graph& graph, NodeId target);

/// Nearest-flag partition by weighted graph distance; equidistant nodes
/// stay neutral and are absent from the result.
std::map<NodeId, std::string> voronoi_territories(const Graph& graph, NodeId red_flag, NodeId blue_flag);

/// Writes the partition into node meta "territory".
void assign_territories(Graph& graph, const std::map<NodeId, std::string>& territories);

/// Layer-35 artist with two flag squares.
void add_flag_artist(VisualEngine& visual, NodeId red_flag, NodeId blue_flag);

}  // namespace advsim
