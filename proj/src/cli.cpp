#include "advsim/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "advsim/config.hpp"
#include "advsim/error.hpp"
#include "advsim/graph_document.hpp"
#include "advsim/log.hpp"
#include "advsim/osm.hpp"
#include "advsim/replay.hpp"
#include "advsim/stream.hpp"

namespace advsim {

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string log_level;
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--config", c.config, "Scenario file (TOML or JSON)");
  cmd.add_option("--preset", c.preset, "Built-in scenario: grid_tag, ctf, aerial_demo");
  cmd.add_option("--seed", c.seed, "Override the scenario seed");
  cmd.add_option("--log-level", c.log_level, "error | warn | info | debug");
}

// flag > environment > file > default
void apply_log_level(const Common& c, const ScenarioConfig& config) {
  if (config.log_level) set_log_level(*config.log_level);
  apply_log_level_env();
  if (!c.log_level.empty()) {
    auto level = parse_log_level(c.log_level);
    if (!level) throw Error(ErrorKind::ConfigError, "--log-level: expected error, warn, info or debug");
    set_log_level(*level);
  }
}

ScenarioConfig load(const Common& c, std::optional<std::uint64_t> fallback_seed = std::nullopt) {
  nlohmann::json document;
  std::filesystem::path base;
  if (!c.config.empty()) {
    document = read_config_document(c.config);
    base = std::filesystem::path(c.config).parent_path();
    if (!c.preset.empty()) document["preset"] = c.preset;
  } else if (!c.preset.empty()) {
    document = {{"preset", c.preset}};
  } else {
    throw Error(ErrorKind::ConfigError, "--config or --preset is required");
  }
  if (c.seed) document["seed"] = *c.seed;
  else if (fallback_seed) document["seed"] = *fallback_seed;
  ScenarioConfig config = parse_config(document, base);
  apply_log_level(c, config);
  return config;
}

Bytes read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
}

std::string hash_hex(std::uint64_t h) { return fmt::format("{:016x}", h); }

VisMode parse_vis(const std::string& text) {
  if (text == "none") return VisMode::None;
  if (text == "stream") return VisMode::Stream;
  throw Error(ErrorKind::ConfigError, "--vis: expected none or stream");
}

std::unique_ptr<stream::StreamBackend> listen(const std::string& address, std::ostream& out) {
  const auto [host, port] = stream::parse_listen_address(address);
  auto server = std::make_unique<stream::Server>(host, port);
  out << "listening=" << host << ":" << server->port() << std::endl;
  return std::make_unique<stream::StreamBackend>(std::move(server));
}

struct VisFlags {
  std::string vis;
  std::string listen;
  double wait_client = 0.0;
};

void add_vis(CLI::App& cmd, VisFlags& v) {
  cmd.add_option("--vis", v.vis, "none | stream");
  cmd.add_option("--listen", v.listen, "HOST:PORT for stream mode (implies --vis stream)");
  cmd.add_option("--wait-client", v.wait_client, "Seconds to wait for a stream client before starting");
}

// Fills BuildOptions from flags and config; returns the stream backend's server if any.
stream::Server* setup_vis(const VisFlags& v, const ScenarioConfig& config, BuildOptions& build, std::ostream& out) {
  VisMode mode = config.vis.mode;
  if (!v.listen.empty()) mode = VisMode::Stream;
  if (!v.vis.empty()) mode = parse_vis(v.vis);
  build.vis = mode;
  if (mode != VisMode::Stream) return nullptr;
  auto backend = listen(v.listen.empty() ? config.vis.listen : v.listen, out);
  stream::Server* server = &backend->server();
  build.backend = std::move(backend);
  if (v.wait_client > 0.0) {
    server->wait_for_clients(1, std::chrono::milliseconds(static_cast<std::int64_t>(v.wait_client * 1000)));
  }
  return server;
}

int cmd_run(const Common& c, const VisFlags& v, std::optional<std::uint64_t> max_turns, const std::string& record,
            std::ostream& out) {
  if (max_turns && *max_turns == 0) throw Error(ErrorKind::ConfigError, "--max-turns must be positive");
  ScenarioConfig config = load(c);
  BuildOptions build;
  setup_vis(v, config, build, out);
  auto ctx = create_context(config, std::move(build));

  const auto start = std::chrono::steady_clock::now();
  while (!ctx->is_terminated() && (!max_turns || ctx->turn() < *max_turns)) ctx->step();
  ctx->terminate();
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  out << fmt::format("turn={} winner={} wall_ms={:.3f}", ctx->turn(), ctx->outcome().value_or("none"), wall_ms)
      << std::endl;
  const std::string path = !record.empty() ? record : config.recording_path.value_or("");
  const Bytes bytes = ctx->finish_recording();
  if (!path.empty()) {
    write_bytes(path, bytes);
    out << "recording=" << path << " bytes=" << bytes.size() << std::endl;
  }
  return kExitOk;
}

int cmd_convert(const std::string& input, double resolution, std::optional<double> tolerance,
                const std::vector<std::string>& highways, bool no_oneway, const std::string& output,
                std::ostream& out) {
  if (!(resolution > 0.0)) throw Error(ErrorKind::ConfigError, "resolution must be positive");
  osm::IngestConfig ingest;
  ingest.resolution = resolution;
  ingest.consolidation_tolerance = tolerance;
  ingest.allowed_highway_classes = {highways.begin(), highways.end()};
  ingest.respect_oneway = !no_oneway;
  GraphDocument document;
  try {
    document = osm::graph_from_xml_file(input, ingest);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  if (!output.empty()) save_graph_document(document, output);
  out << "nodes=" << document.nodes.size() << " edges=" << document.edges.size() << std::endl;
  return kExitOk;
}

std::uint64_t header_seed(const Bytes& bytes) {
  const std::uint16_t version = rec::peek_version(bytes);
  const Bytes current = version == rec::kCurrentVersion ? bytes : rec::translate(bytes, version, rec::kCurrentVersion);
  return rec::decode_recording(current).header.seed;
}

int cmd_replay(const std::string& path, const Common& c, const VisFlags& v, double delay_ms, std::ostream& out) {
  const Bytes bytes = read_bytes(path);
  ScenarioConfig config = load(c, header_seed(bytes));
  BuildOptions build;
  build.strategies = false;
  setup_vis(v, config, build, out);
  std::unique_ptr<BuildOptions> pending = std::make_unique<BuildOptions>(std::move(build));
  auto factory = [&]() { return create_context(config, std::move(*pending)); };
  auto ctx = replay(bytes, factory, [&](Context& replayed, std::uint64_t) {
    replayed.visual().simulate(replayed);
    if (delay_ms > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(delay_ms));
  });
  out << "turns=" << ctx->turn() << " terminated=" << (ctx->is_terminated() ? "true" : "false")
      << " final_hash=" << hash_hex(ctx->state_hash()) << std::endl;
  return kExitOk;
}

int cmd_check(const std::string& path, const Common& c, std::ostream& out) {
  const Bytes bytes = read_bytes(path);
  ScenarioConfig config = load(c, header_seed(bytes));
  auto factory = [&]() {
    BuildOptions build;
    build.strategies = false;
    build.vis = VisMode::None;
    return create_context(config, std::move(build));
  };
  if (!self_check(bytes, factory)) {
    out << "check=failed" << std::endl;
    return kExitCorrupt;
  }
  const Bytes current = rec::peek_version(bytes) == rec::kCurrentVersion
                            ? bytes
                            : rec::translate(bytes, rec::peek_version(bytes), rec::kCurrentVersion);
  const rec::Recording recording = rec::decode_recording(current);
  out << "check=ok turns=" << recording.turn_count() << " events=" << recording.events.size() << std::endl;
  return kExitOk;
}

int cmd_bench(const Common& c, std::uint64_t turns, std::ostream& out) {
  if (turns == 0) throw Error(ErrorKind::ConfigError, "--turns must be positive");
  ScenarioConfig config = load(c);
  BuildOptions build;
  build.recording = rec::Recorder::Mode::CountOnly;
  build.vis = VisMode::None;
  auto ctx = create_context(config, std::move(build));
  const auto start = std::chrono::steady_clock::now();
  while (!ctx->is_terminated() && ctx->turn() < turns) ctx->step();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double rate = seconds > 0.0 ? static_cast<double>(ctx->turn()) / seconds : 0.0;
  out << fmt::format("turns={} turns_per_second={:.1f} peak_events={} final_hash={}", ctx->turn(), rate,
                     ctx->recorder().peak_turn_events(), hash_hex(ctx->state_hash()))
      << std::endl;
  return kExitOk;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ConfigError:
      return kExitConfig;
    case ErrorKind::CorruptRecording:
    case ErrorKind::ConfigMismatch:
    case ErrorKind::UnsupportedVersion:
      return kExitCorrupt;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Turn-based multi-agent simulation on graphs", "advsim"};
  app.require_subcommand(1);

  Common common;
  VisFlags vis;
  std::optional<std::uint64_t> max_turns;
  std::string record;
  auto* run = app.add_subcommand("run", "Run a scenario to termination");
  add_common(*run, common);
  add_vis(*run, vis);
  run->add_option("--max-turns", max_turns, "Stop after this many turns");
  run->add_option("--record", record, "Write the recording here (overrides recording.path)");

  std::string osm_path;
  std::string out_path;
  double resolution = 10.0;
  std::optional<double> tolerance;
  std::vector<std::string> highways;
  bool no_oneway = false;
  auto* convert = app.add_subcommand("convert", "Convert an OSM XML extract into a graph document");
  convert->add_option("osm", osm_path, "OSM XML file")->required();
  convert->add_option("-o,--out", out_path, "Graph document to write");
  convert->add_option("--resolution", resolution, "Maximum node spacing in meters");
  convert->add_option("--tolerance", tolerance, "Intersection merge distance (default resolution/2)");
  convert->add_option("--highway", highways, "Keep only these highway classes (repeatable)");
  convert->add_flag("--no-oneway", no_oneway, "Emit both directions for oneway roads");
  convert->add_option("--log-level", common.log_level, "error | warn | info | debug");

  std::string recording_path;
  double delay_ms = 0.0;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a recording");
  replay_cmd->add_option("recording", recording_path, "Recording file")->required();
  add_common(*replay_cmd, common);
  add_vis(*replay_cmd, vis);
  replay_cmd->add_option("--delay-ms", delay_ms, "Pause between turns");

  auto* check = app.add_subcommand("check", "Verify a recording by re-recording it");
  check->add_option("recording", recording_path, "Recording file")->required();
  add_common(*check, common);

  std::uint64_t turns = 10000;
  auto* bench = app.add_subcommand("bench", "Measure headless throughput");
  add_common(*bench, common);
  bench->add_option("--turns", turns, "Turns to run");

  std::vector<std::string> argv_storage{"advsim"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "advsim: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(common, vis, max_turns, record, out);
    if (convert->parsed()) {
      if (!common.log_level.empty()) {
        auto level = parse_log_level(common.log_level);
        if (!level) throw Error(ErrorKind::ConfigError, "--log-level: expected error, warn, info or debug");
        set_log_level(*level);
      }
      return cmd_convert(osm_path, resolution, tolerance, highways, no_oneway, out_path, out);
    }
    if (replay_cmd->parsed()) return cmd_replay(recording_path, common, vis, delay_ms, out);
    if (check->parsed()) return cmd_check(recording_path, common, out);
    return cmd_bench(common, turns, out);
  } catch (const Error& e) {
    err << "advsim: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "advsim: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace advsim
