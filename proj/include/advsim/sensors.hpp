#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "advsim/graph.hpp"

namespace advsim {

struct NeighborSensor {
  friend bool operator==(const NeighborSensor&, const NeighborSensor&) = default;
};
struct MapSensor {
  friend bool operator==(const MapSensor&, const MapSensor&) = default;
};
struct AgentSensor {
  friend bool operator==(const AgentSensor&, const AgentSensor&) = default;
};
struct ArcSensor {
  double range = 0.0;  // meters
  double fov = 0.0;    // radians, (0, 2*pi]
  friend bool operator==(const ArcSensor&, const ArcSensor&) = default;
};
struct CustomSensor {
  std::string key;
  friend bool operator==(const CustomSensor&, const CustomSensor&) = default;
};

using SensorKind = std::variant<NeighborSensor, MapSensor, AgentSensor, ArcSensor, CustomSensor>;

enum class SensorType { Neighbor, Map, Agent, Arc, Custom };
SensorType type_of(const SensorKind& kind);
std::string_view to_string(SensorType type);

/// Current node plus targets of outgoing edges (ascending edge id, no repeats).
struct NeighborReading {
  std::vector<NodeId> nodes;
  friend bool operator==(const NeighborReading&, const NeighborReading&) = default;
};
/// Immutable copy of the graph at sensing time.
struct MapReading {
  std::shared_ptr<const Graph> graph;
  friend bool operator==(const MapReading& a, const MapReading& b) {
    return a.graph == b.graph || (a.graph && b.graph && *a.graph == *b.graph);
  }
};
struct AgentReading {
  std::map<std::string, NodeId> positions;
  friend bool operator==(const AgentReading&, const AgentReading&) = default;
};
struct ArcReading {
  std::vector<NodeId> nodes;  // ascending
  std::vector<EdgeId> edges;  // ascending
  friend bool operator==(const ArcReading&, const ArcReading&) = default;
};
struct CustomReading {
  nlohmann::json payload;  // null until the first injection
  friend bool operator==(const CustomReading&, const CustomReading&) = default;
};

using SensorReading = std::variant<NeighborReading, MapReading, AgentReading, ArcReading, CustomReading>;

/// Read-only inputs of one sensing call.
struct SenseInput {
  const Graph& graph;
  const std::vector<std::pair<std::string, NodeId>>& agent_positions;
  NodeId position;
  double heading = 0.0;  // radians, counterclockwise from +x
};

class Sensor {
 public:
  Sensor(std::string name, SensorKind kind);

  const std::string& name() const { return name_; }
  const SensorKind& kind() const { return kind_; }
  SensorType type() const { return type_of(kind_); }

  SensorReading sense(const SenseInput& input) const;

  void inject(nlohmann::json payload);

 private:
  std::string name_;
  SensorKind kind_;
  nlohmann::json payload_;
  mutable std::mutex snapshot_mutex_;
  mutable std::shared_ptr<const Graph> snapshot_;
  mutable std::uint64_t snapshot_version_ = 0;
};

/// Free-standing sensing routines, usable without a registered sensor.
NeighborReading sense_neighbors(const Graph& graph, NodeId position);
ArcReading sense_arc(const Graph& graph, NodeId position, double heading, const ArcSensor& arc);

class SensorEngine {
 public:
  Sensor& create_sensor(const std::string& name, SensorKind kind);
  bool contains(const std::string& name) const { return sensors_.contains(name); }
  const Sensor& get(const std::string& name) const;
  Sensor& get(const std::string& name);

  /// Sets the payload a CUSTOM sensor returns from now on.
  void inject(const std::string& name, nlohmann::json payload);

  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::unique_ptr<Sensor>> sensors_;
};

}  // namespace advsim
