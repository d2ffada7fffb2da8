#include "advsim/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "advsim/error.hpp"
#include "advsim/kernels.hpp"

namespace advsim {

SensorType type_of(const SensorKind& kind) { return static_cast<SensorType>(kind.index()); }

std::string_view to_string(SensorType type) {
  switch (type) {
    case SensorType::Neighbor: return "neighbor";
    case SensorType::Map: return "map";
    case SensorType::Agent: return "agent";
    case SensorType::Arc: return "arc";
    case SensorType::Custom: return "custom";
  }
  return "custom";
}

NeighborReading sense_neighbors(const Graph& graph, NodeId position) {
  NeighborReading reading;
  reading.nodes.push_back(position);
  for (EdgeId e : graph.out_edges(position)) {
    const NodeId target = graph.edge(e).target;
    if (std::find(reading.nodes.begin(), reading.nodes.end(), target) == reading.nodes.end()) {
      reading.nodes.push_back(target);
    }
  }
  return reading;
}

ArcReading sense_arc(const Graph& graph, NodeId position, double heading, const ArcSensor& arc) {
  const Node& origin = graph.node(position);
  const auto table = graph.coordinates();
  std::vector<std::uint8_t> mask(table->ids.size());
  kernels::cone_mask(table->xs, table->ys, kernels::make_cone(origin.x, origin.y, arc.range, heading, arc.fov), mask);

  ArcReading reading;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) reading.nodes.push_back(table->ids[i]);
  }
  for (NodeId node : reading.nodes) {
    for (EdgeId e : graph.out_edges(node)) {
      if (std::binary_search(reading.nodes.begin(), reading.nodes.end(), graph.edge(e).target)) {
        reading.edges.push_back(e);
      }
    }
  }
  std::sort(reading.edges.begin(), reading.edges.end());
  return reading;
}

Sensor::Sensor(std::string name, SensorKind kind) : name_(std::move(name)), kind_(std::move(kind)) {
  if (const auto* arc = std::get_if<ArcSensor>(&kind_)) {
    if (!(arc->range > 0.0) || !(arc->fov > 0.0) || arc->fov > 2.0 * std::numbers::pi + 1e-12) {
      throw Error(ErrorKind::InvalidArgument, "sensor '" + name_ + "': ARC needs range > 0 and fov in (0, 2pi]");
    }
  }
}

SensorReading Sensor::sense(const SenseInput& input) const {
  if (!input.graph.has_node(input.position)) {
    throw Error(ErrorKind::UnknownNode, "sensor '" + name_ + "' at node " + std::to_string(raw(input.position)));
  }
  return std::visit(
      [&](const auto& kind) -> SensorReading {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, NeighborSensor>) {
          return sense_neighbors(input.graph, input.position);
        } else if constexpr (std::is_same_v<T, MapSensor>) {
          std::lock_guard lock(snapshot_mutex_);
          if (!snapshot_ || snapshot_version_ != input.graph.version()) {
            snapshot_ = std::make_shared<const Graph>(input.graph);
            snapshot_version_ = input.graph.version();
          }
          return MapReading{snapshot_};
        } else if constexpr (std::is_same_v<T, AgentSensor>) {
          AgentReading reading;
          for (const auto& [name, node] : input.agent_positions) reading.positions[name] = node;
          return reading;
        } else if constexpr (std::is_same_v<T, ArcSensor>) {
          return sense_arc(input.graph, input.position, input.heading, kind);
        } else {
          return CustomReading{payload_};
        }
      },
      kind_);
}

void Sensor::inject(nlohmann::json payload) {
  if (type() != SensorType::Custom) {
    throw Error(ErrorKind::KindMismatch, "sensor '" + name_ + "' is " + std::string(to_string(type())));
  }
  payload_ = std::move(payload);
}

Sensor& SensorEngine::create_sensor(const std::string& name, SensorKind kind) {
  if (sensors_.contains(name)) throw Error(ErrorKind::DuplicateSensorName, name);
  auto sensor = std::make_unique<Sensor>(name, std::move(kind));
  return *sensors_.emplace(name, std::move(sensor)).first->second;
}

const Sensor& SensorEngine::get(const std::string& name) const {
  auto it = sensors_.find(name);
  if (it == sensors_.end()) throw Error(ErrorKind::UnknownSensor, name);
  return *it->second;
}

Sensor& SensorEngine::get(const std::string& name) {
  auto it = sensors_.find(name);
  if (it == sensors_.end()) throw Error(ErrorKind::UnknownSensor, name);
  return *it->second;
}

void SensorEngine::inject(const std::string& name, nlohmann::json payload) { get(name).inject(std::move(payload)); }

std::vector<std::string> SensorEngine::names() const {
  std::vector<std::string> out;
  for (const auto& [name, sensor] : sensors_) out.push_back(name);
  return out;
}

}  // namespace advsim
