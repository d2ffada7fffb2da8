#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "advsim/context.hpp"
#include "advsim/log.hpp"

namespace advsim {

struct GraphSpec {
  std::string source = "grid";  // grid | document | osm; "none" when the config has no graph
  std::size_t grid_size = 20;
  double grid_spacing = 20.0;
  std::string path;  // document / osm, resolved against the config directory
  double resolution = 10.0;
  std::optional<double> consolidation_tolerance;
  std::vector<std::string> highway_classes;
  bool respect_oneway = true;
};

struct SensorSpec {
  std::string name;
  std::string type;  // neighbor | map | agent | arc | custom
  double range = 0.0;
  double fov = 0.0;
  std::string key;
};

struct AgentSpec {
  std::string name;
  std::string kind = "ground";  // ground | aerial
  double speed = 1.0;
  NodeId start_node{};
  std::string team;
  std::vector<std::string> sensors;
  std::string strategy = "random";  // random | stay | human | seek | patrol
  std::optional<NodeId> target;     // seek
  double noise = 0.0;               // seek
  std::vector<NodeId> waypoints;    // patrol
};

struct RuleSpec {
  std::string name;  // tag | flag_capture | max_turns
  bool territorial = false;
  std::optional<NodeId> red_flag;
  std::optional<NodeId> blue_flag;
  std::uint64_t limit = 0;
};

struct VisSpec {
  VisMode mode = VisMode::None;
  double width = 800;
  double height = 800;
  std::string listen = "127.0.0.1:8765";
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  GraphSpec graph;
  std::vector<SensorSpec> sensors;
  std::vector<AgentSpec> agents;
  std::vector<RuleSpec> rules;
  ConflictPolicy conflict_policy = AllowAll{};
  VisSpec vis;
  std::optional<std::string> recording_path;
  std::optional<std::chrono::milliseconds> human_timeout;
  std::optional<LogLevel> log_level;

  /// Normalized document (preset expanded) the typed fields came from.
  nlohmann::json document;
  /// Hash of the run-defining part of the document plus any graph file.
  Digest digest{};
};

/// Built-in scenario documents: "grid_tag", "ctf", "aerial_demo".
nlohmann::json preset(const std::string& name);
std::vector<std::string> preset_names();

/// Expands "preset" (the document's fields override the preset's), then
/// validates. Errors are ConfigError naming the field path.
ScenarioConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir = {});

/// Reads JSON, or TOML for a .toml extension.
nlohmann::json read_config_document(const std::filesystem::path& path);
ScenarioConfig load_config(const std::filesystem::path& path);

struct BuildOptions {
  /// False for replay: agents keep no strategy and nobody is asked for input.
  bool strategies = true;
  rec::Recorder::Mode recording = rec::Recorder::Mode::Buffer;
  std::optional<VisMode> vis;
  std::unique_ptr<VisualBackend> backend;
};

std::unique_ptr<Context> create_context(const ScenarioConfig& config, BuildOptions options = {});

}  // namespace advsim
