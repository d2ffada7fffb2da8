#include "advsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "advsim/error.hpp"
#include "advsim/graph_document.hpp"
#include "advsim/osm.hpp"
#include "advsim/scenarios.hpp"
#include "advsim/stream.hpp"

namespace advsim {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ConfigError, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::uint64_t as_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  fail(path, "expected a non-negative integer");
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

// Object reader that rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "expected a table");
  }

  const json* find(const std::string& key) {
    known_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }
  const json& need(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(at(key), "required");
    return *v;
  }
  std::string at(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!known_.contains(key)) fail(at(key), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

json toml_to_json(const toml::node& node) {
  if (const auto* table = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *table) out[std::string(key.str())] = toml_to_json(value);
    return out;
  }
  if (const auto* array = node.as_array()) {
    json out = json::array();
    for (const auto& value : *array) out.push_back(toml_to_json(value));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw Error(ErrorKind::ConfigError, "unsupported TOML value (dates and times are not config values)");
}

GraphSpec parse_graph(const json& j, const std::filesystem::path& base_dir) {
  Fields f(j, "graph");
  GraphSpec spec;
  if (const json* v = f.find("source")) spec.source = as_string(*v, f.at("source"));
  const json empty = json::object();
  const json* params = f.find("params");
  Fields p(params ? *params : empty, "graph.params");
  if (spec.source == "grid") {
    if (const json* v = p.find("n")) spec.grid_size = as_u64(*v, p.at("n"));
    if (const json* v = p.find("spacing")) spec.grid_spacing = as_double(*v, p.at("spacing"));
    if (spec.grid_size == 0) fail(p.at("n"), "must be at least 1");
    if (!(spec.grid_spacing > 0.0)) fail(p.at("spacing"), "must be positive");
  } else if (spec.source == "document" || spec.source == "osm") {
    std::filesystem::path path = as_string(p.need("path"), p.at("path"));
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    spec.path = path.string();
    if (spec.source == "osm") {
      if (const json* v = p.find("resolution")) spec.resolution = as_double(*v, p.at("resolution"));
      if (!(spec.resolution > 0.0)) fail(p.at("resolution"), "resolution must be positive");
      if (const json* v = p.find("consolidation_tolerance")) {
        spec.consolidation_tolerance = as_double(*v, p.at("consolidation_tolerance"));
      }
      if (const json* v = p.find("highway_classes")) {
        for (std::size_t i = 0; i < as_array(*v, p.at("highway_classes")).size(); ++i) {
          spec.highway_classes.push_back(as_string((*v)[i], index(p.at("highway_classes"), i)));
        }
      }
      if (const json* v = p.find("respect_oneway")) spec.respect_oneway = as_bool(*v, p.at("respect_oneway"));
    }
  } else {
    fail(f.at("source"), "expected grid, document or osm");
  }
  p.finish();
  f.finish();
  return spec;
}

SensorSpec parse_sensor(const json& j, const std::string& path) {
  Fields f(j, path);
  SensorSpec s;
  s.name = as_string(f.need("name"), f.at("name"));
  s.type = as_string(f.need("type"), f.at("type"));
  if (s.type == "arc") {
    s.range = as_double(f.need("range"), f.at("range"));
    s.fov = as_double(f.need("fov"), f.at("fov"));
    if (!(s.range > 0.0)) fail(f.at("range"), "must be positive");
    if (!(s.fov > 0.0 && s.fov <= 2.0 * 3.141592653589793 + 1e-12)) fail(f.at("fov"), "must be in (0, 2*pi]");
  } else if (s.type == "custom") {
    if (const json* v = f.find("key")) s.key = as_string(*v, f.at("key"));
  } else if (s.type != "neighbor" && s.type != "map" && s.type != "agent") {
    fail(f.at("type"), "expected neighbor, map, agent, arc or custom");
  }
  f.finish();
  return s;
}

AgentSpec parse_agent(const json& j, const std::string& path) {
  Fields f(j, path);
  AgentSpec a;
  a.name = as_string(f.need("name"), f.at("name"));
  if (a.name.empty()) fail(f.at("name"), "must not be empty");
  if (const json* v = f.find("kind")) a.kind = as_string(*v, f.at("kind"));
  if (a.kind != "ground" && a.kind != "aerial") fail(f.at("kind"), "expected ground or aerial");
  if (const json* v = f.find("speed")) a.speed = as_double(*v, f.at("speed"));
  if (a.kind == "aerial" && !(a.speed > 0.0)) fail(f.at("speed"), "must be positive");
  a.start_node = NodeId{as_u64(f.need("start_node"), f.at("start_node"))};
  if (const json* v = f.find("team")) a.team = as_string(*v, f.at("team"));
  if (const json* v = f.find("sensors")) {
    for (std::size_t i = 0; i < as_array(*v, f.at("sensors")).size(); ++i) {
      a.sensors.push_back(as_string((*v)[i], index(f.at("sensors"), i)));
    }
  }
  if (const json* v = f.find("strategy")) a.strategy = as_string(*v, f.at("strategy"));
  static const std::set<std::string> strategies{"random", "stay", "human", "seek", "patrol"};
  if (!strategies.contains(a.strategy)) fail(f.at("strategy"), "expected random, stay, human, seek or patrol");
  if (const json* v = f.find("target")) a.target = NodeId{as_u64(*v, f.at("target"))};
  if (const json* v = f.find("noise")) a.noise = as_double(*v, f.at("noise"));
  if (!(a.noise >= 0.0 && a.noise <= 1.0)) fail(f.at("noise"), "must be within [0, 1]");
  if (const json* v = f.find("waypoints")) {
    for (std::size_t i = 0; i < as_array(*v, f.at("waypoints")).size(); ++i) {
      a.waypoints.push_back(NodeId{as_u64((*v)[i], index(f.at("waypoints"), i))});
    }
  }
  if (a.strategy == "seek" && !a.target) fail(f.at("target"), "required by the seek strategy");
  if (a.strategy == "patrol" && a.waypoints.empty()) fail(f.at("waypoints"), "required by the patrol strategy");
  f.finish();
  return a;
}

RuleSpec parse_rule(const json& j, const std::string& path) {
  RuleSpec r;
  const json empty = json::object();
  const json* params = &empty;
  std::optional<Fields> outer;
  if (j.is_string()) {
    r.name = j.get<std::string>();
  } else {
    outer.emplace(j, path);
    r.name = as_string(outer->need("name"), outer->at("name"));
    if (const json* v = outer->find("params")) params = v;
  }
  const std::string ppath = join(path, "params");
  Fields p(*params, ppath);
  if (r.name == "tag") {
    if (const json* v = p.find("territorial")) r.territorial = as_bool(*v, p.at("territorial"));
    if (const json* v = p.find("red_flag")) r.red_flag = NodeId{as_u64(*v, p.at("red_flag"))};
    if (const json* v = p.find("blue_flag")) r.blue_flag = NodeId{as_u64(*v, p.at("blue_flag"))};
  } else if (r.name == "flag_capture") {
    r.red_flag = NodeId{as_u64(p.need("red_flag"), p.at("red_flag"))};
    r.blue_flag = NodeId{as_u64(p.need("blue_flag"), p.at("blue_flag"))};
  } else if (r.name == "max_turns") {
    r.limit = as_u64(p.need("limit"), p.at("limit"));
    if (r.limit == 0) fail(p.at("limit"), "must be at least 1");
  } else {
    fail(j.is_string() ? path : join(path, "name"), "unknown rule '" + r.name + "'");
  }
  p.finish();
  if (outer) outer->finish();
  return r;
}

ConflictPolicy parse_policy(const json& j) {
  const std::string path = "conflict_policy";
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "allow_all") return AllowAll{};
    if (name == "random") return RandomPolicy{};
    fail(path, "expected allow_all, random or {priority = {...}}");
  }
  Fields f(j, path);
  const json& ranks = f.need("priority");
  Fields r(ranks, f.at("priority"));
  PriorityPolicy policy;
  for (const auto& [name, value] : ranks.items()) {
    if (!value.is_number_integer()) fail(r.at(name), "expected an integer rank");
    policy.ranks[name] = value.get<std::int64_t>();
    r.find(name);
  }
  r.finish();
  f.finish();
  return policy;
}

VisSpec parse_vis(const json& j) {
  Fields f(j, "vis");
  VisSpec v;
  if (const json* m = f.find("mode")) {
    const std::string mode = as_string(*m, f.at("mode"));
    if (mode == "none") v.mode = VisMode::None;
    else if (mode == "stream") v.mode = VisMode::Stream;
    else fail(f.at("mode"), "expected none or stream");
  }
  if (const json* w = f.find("width")) v.width = as_double(*w, f.at("width"));
  if (const json* h = f.find("height")) v.height = as_double(*h, f.at("height"));
  if (!(v.width > 0.0)) fail(f.at("width"), "must be positive");
  if (!(v.height > 0.0)) fail(f.at("height"), "must be positive");
  if (const json* l = f.find("listen")) v.listen = as_string(*l, f.at("listen"));
  try {
    stream::parse_listen_address(v.listen);
  } catch (const Error& e) {
    fail(f.at("listen"), e.detail());
  }
  f.finish();
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

json agent(const std::string& name, const std::string& team, std::uint64_t start, const std::string& strategy,
           std::vector<std::string> sensors) {
  return {{"name", name}, {"team", team}, {"start_node", start}, {"strategy", strategy}, {"sensors", sensors}};
}

}  // namespace

std::vector<std::string> preset_names() { return {"grid_tag", "ctf", "aerial_demo"}; }

json preset(const std::string& name) {
  if (name == "grid_tag") {
    return {
        {"seed", 42},
        {"graph", {{"source", "grid"}, {"params", {{"n", 20}, {"spacing", 20}}}}},
        {"sensors", json::array({{{"name", "nbr"}, {"type", "neighbor"}}})},
        {"agents", json::array({agent("red_0", "red", 0, "random", {"nbr"}), agent("red_1", "red", 1, "random", {"nbr"}),
                                agent("blue_0", "blue", 399, "random", {"nbr"}),
                                agent("blue_1", "blue", 398, "random", {"nbr"})})},
        {"rules", json::array({"tag",
                               {{"name", "flag_capture"}, {"params", {{"red_flag", 0}, {"blue_flag", 399}}}},
                               {{"name", "max_turns"}, {"params", {{"limit", 200}}}}})},
        {"conflict_policy", "allow_all"},
    };
  }
  if (name == "ctf") {
    json red_attacker = agent("red_attacker", "red", 51, "seek", {"nbr"});
    red_attacker["target"] = 525;
    red_attacker["noise"] = 0.25;
    json blue_attacker = agent("blue_attacker", "blue", 524, "seek", {"nbr"});
    blue_attacker["target"] = 50;
    blue_attacker["noise"] = 0.25;
    return {
        {"seed", 7},
        {"graph", {{"source", "grid"}, {"params", {{"n", 24}, {"spacing", 20}}}}},
        {"sensors", json::array({{{"name", "nbr"}, {"type", "neighbor"}}})},
        {"agents", json::array({red_attacker, agent("red_guard_0", "red", 50, "random", {"nbr"}),
                                agent("red_guard_1", "red", 74, "random", {"nbr"}), blue_attacker,
                                agent("blue_guard_0", "blue", 525, "random", {"nbr"}),
                                agent("blue_guard_1", "blue", 501, "random", {"nbr"})})},
        {"rules", json::array({{{"name", "tag"}, {"params", {{"territorial", true}}}},
                               {{"name", "flag_capture"}, {"params", {{"red_flag", 50}, {"blue_flag", 525}}}},
                               {{"name", "max_turns"}, {"params", {{"limit", 2000}}}}})},
        {"conflict_policy", "allow_all"},
    };
  }
  if (name == "aerial_demo") {
    json drone = agent("aerial", "blue", 0, "patrol", {"camera", "agents"});
    drone["kind"] = "aerial";
    drone["speed"] = 5.0;
    drone["waypoints"] = {19, 399, 380, 0};
    return {
        {"seed", 11},
        {"graph", {{"source", "grid"}, {"params", {{"n", 20}, {"spacing", 20}}}}},
        {"sensors", json::array({{{"name", "nbr"}, {"type", "neighbor"}},
                                 {{"name", "agents"}, {"type", "agent"}},
                                 {{"name", "camera"}, {"type", "arc"}, {"range", 50}, {"fov", 2.5}}})},
        {"agents", json::array({agent("ground_0", "red", 210, "random", {"nbr"}),
                                agent("ground_1", "red", 189, "random", {"nbr"}), drone})},
        {"rules", json::array({{{"name", "max_turns"}, {"params", {{"limit", 500}}}}})},
        {"conflict_policy", "allow_all"},
    };
  }
  fail("preset", "unknown preset '" + name + "'");
}

ScenarioConfig parse_config(const json& input, const std::filesystem::path& base_dir) {
  if (!input.is_object()) fail("config", "expected a table");
  json document = input;
  if (auto it = input.find("preset"); it != input.end()) {
    json merged = preset(as_string(*it, "preset"));
    for (const auto& [key, value] : input.items()) {
      if (key != "preset") merged[key] = value;
    }
    document = std::move(merged);
  }

  Fields f(document, "");
  ScenarioConfig c;
  if (const json* v = f.find("seed")) c.seed = as_u64(*v, "seed");
  if (const json* v = f.find("graph")) c.graph = parse_graph(*v, base_dir);
  else c.graph.source = "none";
  if (const json* v = f.find("sensors")) {
    for (std::size_t i = 0; i < as_array(*v, "sensors").size(); ++i) {
      c.sensors.push_back(parse_sensor((*v)[i], index("sensors", i)));
    }
  }
  if (const json* v = f.find("agents")) {
    for (std::size_t i = 0; i < as_array(*v, "agents").size(); ++i) {
      c.agents.push_back(parse_agent((*v)[i], index("agents", i)));
    }
  }
  if (const json* v = f.find("rules")) {
    for (std::size_t i = 0; i < as_array(*v, "rules").size(); ++i) {
      c.rules.push_back(parse_rule((*v)[i], index("rules", i)));
    }
  }
  if (const json* v = f.find("conflict_policy")) c.conflict_policy = parse_policy(*v);
  if (const json* v = f.find("vis")) c.vis = parse_vis(*v);
  if (const json* v = f.find("recording")) {
    Fields r(*v, "recording");
    if (const json* p = r.find("path")) {
      std::filesystem::path path = as_string(*p, r.at("path"));
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      c.recording_path = path.string();
    }
    r.finish();
  }
  if (const json* v = f.find("human_timeout_ms")) {
    c.human_timeout = std::chrono::milliseconds(as_u64(*v, "human_timeout_ms"));
  }
  if (const json* v = f.find("log_level")) {
    c.log_level = parse_log_level(as_string(*v, "log_level"));
    if (!c.log_level) fail("log_level", "expected error, warn, info or debug");
  }
  f.finish();

  // Names must be unique and references must resolve.
  std::set<std::string> sensor_names;
  for (std::size_t i = 0; i < c.sensors.size(); ++i) {
    if (!sensor_names.insert(c.sensors[i].name).second) fail(index("sensors", i) + ".name", "duplicate sensor");
  }
  std::set<std::string> agent_names;
  for (std::size_t i = 0; i < c.agents.size(); ++i) {
    const AgentSpec& a = c.agents[i];
    if (!agent_names.insert(a.name).second) fail(index("agents", i) + ".name", "duplicate agent");
    for (std::size_t s = 0; s < a.sensors.size(); ++s) {
      if (!sensor_names.contains(a.sensors[s])) {
        fail(index(index("agents", i) + ".sensors", s), "unknown sensor '" + a.sensors[s] + "'");
      }
    }
  }
  if (const auto* priority = std::get_if<PriorityPolicy>(&c.conflict_policy)) {
    for (const auto& [name, rank] : priority->ranks) {
      if (!agent_names.contains(name)) fail("conflict_policy.priority." + name, "unknown agent");
    }
  }

  c.document = document;
  json canonical = document;
  for (const char* key : {"seed", "vis", "recording", "human_timeout_ms", "log_level"}) canonical.erase(key);
  std::string material = canonical.dump();
  if (c.graph.source == "document" || c.graph.source == "osm") {
    try {
      material += "\n" + to_hex(sha256(read_file(c.graph.path)));
    } catch (const Error& e) {
      fail("graph.params.path", e.detail());
    }
  }
  c.digest = sha256(material);
  return c;
}

json read_config_document(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    fail("config", e.detail());
  }
  if (path.extension() == ".toml") {
    try {
      return toml_to_json(toml::parse(text, path.string()));
    } catch (const toml::parse_error& e) {
      std::ostringstream where;
      where << path.string() << ":" << e.source().begin.line << ": " << e.description();
      fail("config", where.str());
    }
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail("config", path.string() + ": " + e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_config_document(path), path.parent_path());
}

namespace {

Color team_color(const std::string& team, bool aerial) {
  if (aerial) return {40, 170, 60};
  if (team == "red") return {220, 40, 40};
  if (team == "blue") return {40, 80, 220};
  return {90, 90, 90};
}

void build_graph(Graph& graph, const GraphSpec& spec) {
  if (spec.source == "none") return;
  if (spec.source == "grid") {
    create_grid(graph, spec.grid_size, spec.grid_spacing);
    return;
  }
  try {
    GraphDocument document;
    if (spec.source == "document") {
      document = load_graph_document(spec.path);
    } else {
      osm::IngestConfig ingest;
      ingest.resolution = spec.resolution;
      ingest.consolidation_tolerance = spec.consolidation_tolerance;
      ingest.allowed_highway_classes = {spec.highway_classes.begin(), spec.highway_classes.end()};
      ingest.respect_oneway = spec.respect_oneway;
      document = osm::graph_from_xml_file(spec.path, ingest);
    }
    graph.bulk_attach(document);
  } catch (const Error& e) {
    fail("graph.params.path", e.what());
  }
}

}  // namespace

std::unique_ptr<Context> create_context(const ScenarioConfig& config, BuildOptions options) {
  if (config.log_level) set_log_level(*config.log_level);

  ContextOptions ctx_options;
  ctx_options.seed = config.seed;
  ctx_options.config_digest = config.digest;
  ctx_options.recording = options.recording;
  ctx_options.vis = options.vis.value_or(config.vis.mode);
  ctx_options.human_timeout = config.human_timeout;
  auto ctx = std::make_unique<Context>(ctx_options);
  Graph& graph = ctx->graph();
  build_graph(graph, config.graph);

  for (const SensorSpec& s : config.sensors) {
    SensorKind kind = NeighborSensor{};
    if (s.type == "map") kind = MapSensor{};
    else if (s.type == "agent") kind = AgentSensor{};
    else if (s.type == "arc") kind = ArcSensor{s.range, s.fov};
    else if (s.type == "custom") kind = CustomSensor{s.key};
    ctx->create_sensor(s.name, kind);
  }

  auto team_members = [&](const std::string& team) {
    std::vector<std::string> out;
    for (const AgentSpec& a : config.agents) {
      if (a.team == team) out.push_back(a.name);
    }
    return out;
  };

  for (std::size_t i = 0; i < config.agents.size(); ++i) {
    const AgentSpec& a = config.agents[i];
    const std::string path = "agents[" + std::to_string(i) + "]";
    if (!graph.has_node(a.start_node)) {
      fail(path + ".start_node", "unknown node " + std::to_string(raw(a.start_node)));
    }
    MetaMap meta;
    if (!a.team.empty()) meta["team"] = a.team;
    AgentKind kind = GroundKind{};
    if (a.kind == "aerial") kind = AerialKind{a.speed};
    ctx->create_agent(a.name, kind, a.start_node, std::move(meta));
    for (const std::string& sensor : a.sensors) ctx->register_sensor(a.name, sensor);

    if (options.strategies) {
      if (a.target && !graph.has_node(*a.target)) fail(path + ".target", "unknown node");
      for (std::size_t w = 0; w < a.waypoints.size(); ++w) {
        if (!graph.has_node(a.waypoints[w])) fail(path + ".waypoints[" + std::to_string(w) + "]", "unknown node");
      }
      if (a.strategy == "random") ctx->register_strategy(a.name, random_neighbor_strategy);
      else if (a.strategy == "stay") ctx->register_strategy(a.name, stay_strategy);
      else if (a.strategy == "seek") ctx->register_strategy(a.name, seek_strategy(graph, *a.target, a.noise));
      else if (a.strategy == "patrol") ctx->register_strategy(a.name, patrol_strategy(graph, a.name, a.waypoints));
    } else {
      ctx->register_strategy(a.name, stay_strategy);
    }
  }

  std::optional<NodeId> red_flag;
  std::optional<NodeId> blue_flag;
  for (std::size_t i = 0; i < config.rules.size(); ++i) {
    const RuleSpec& r = config.rules[i];
    const std::string path = "rules[" + std::to_string(i) + "].params";
    if (r.red_flag && !graph.has_node(*r.red_flag)) fail(path + ".red_flag", "unknown node");
    if (r.blue_flag && !graph.has_node(*r.blue_flag)) fail(path + ".blue_flag", "unknown node");
    if (r.name == "flag_capture" || (r.red_flag && r.blue_flag)) {
      red_flag = red_flag.value_or(*r.red_flag);
      blue_flag = blue_flag.value_or(*r.blue_flag);
    }
  }

  for (std::size_t i = 0; i < config.rules.size(); ++i) {
    const RuleSpec& r = config.rules[i];
    if (r.name == "tag") {
      if (r.territorial && !red_flag) {
        fail("rules[" + std::to_string(i) + "].params.red_flag", "territorial tag needs flags");
      }
      ctx->add_rule(make_tag_rule({team_members("red"), team_members("blue"), r.territorial}));
    } else if (r.name == "flag_capture") {
      ctx->add_rule(make_flag_capture_rule({*r.red_flag, *r.blue_flag, team_members("red"), team_members("blue")}));
    } else {
      ctx->add_rule(make_max_turns_rule(r.limit));
    }
  }
  if (red_flag && blue_flag) assign_territories(graph, voronoi_territories(graph, *red_flag, *blue_flag));
  ctx->set_conflict_policy(config.conflict_policy);

  VisualEngine& visual = ctx->visual();
  visual.set_graph_visual(*ctx, config.vis.width, config.vis.height);
  for (const SensorSpec& s : config.sensors) {
    if (s.type == "arc") visual.set_sensor_visual(*ctx, s.name, {250, 200, 40}, {250, 160, 20});
  }
  if (red_flag && blue_flag) add_flag_artist(visual, *red_flag, *blue_flag);
  for (const AgentSpec& a : config.agents) {
    visual.set_agent_visual(*ctx, a.name, team_color(a.team, a.kind == "aerial"), a.kind == "aerial" ? 6.0 : 4.0);
  }
  if (options.backend) visual.set_backend(std::move(options.backend));
  return ctx;
}

}  // namespace advsim
