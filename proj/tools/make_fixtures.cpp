// Regenerates the checked-in test fixtures:
//   osm_cross.osm      plus-shaped road, four 95 m arms around one junction
//   v1_scenario.json   scenario the v1 recording was made with
//   v1_recording.gmar  that run encoded in format version 1
//   v1_positions.json  per-turn agent nodes of the live run
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "advsim/config.hpp"
#include "advsim/osm.hpp"

using namespace advsim;

namespace {

void write_cross(const std::string& path) {
  constexpr double kLat = 32.85;
  constexpr double kLon = -117.27;
  constexpr double kArm = 95.0;
  constexpr double kPi = 3.141592653589793;
  const double dlat = kArm / osm::kEarthRadius * 180.0 / kPi;
  const double dlon = kArm / (osm::kEarthRadius * std::cos(kLat * kPi / 180.0)) * 180.0 / kPi;
  std::ofstream out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<osm version=\"0.6\" generator=\"make_fixtures\">\n";
  auto node = [&](int id, double lat, double lon) {
    out << fmt::format("  <node id=\"{}\" lat=\"{:.10f}\" lon=\"{:.10f}\"/>\n", id, lat, lon);
  };
  node(1, kLat, kLon);
  node(2, kLat + dlat, kLon);
  node(3, kLat - dlat, kLon);
  node(4, kLat, kLon + dlon);
  node(5, kLat, kLon - dlon);
  out << "  <way id=\"10\">\n    <nd ref=\"2\"/>\n    <nd ref=\"1\"/>\n    <nd ref=\"3\"/>\n"
         "    <tag k=\"highway\" v=\"residential\"/>\n  </way>\n";
  out << "  <way id=\"11\">\n    <nd ref=\"5\"/>\n    <nd ref=\"1\"/>\n    <nd ref=\"4\"/>\n"
         "    <tag k=\"highway\" v=\"residential\"/>\n  </way>\n";
  out << "</osm>\n";
}

nlohmann::json v1_scenario() {
  auto agent = [](const std::string& name, const std::string& team, int start) {
    return nlohmann::json{{"name", name}, {"team", team}, {"start_node", start}, {"sensors", {"nbr"}},
                          {"strategy", "random"}};
  };
  return {
      {"seed", 2024},
      {"graph", {{"source", "grid"}, {"params", {{"n", 8}, {"spacing", 20}}}}},
      {"sensors", {{{"name", "nbr"}, {"type", "neighbor"}}}},
      {"agents", {agent("red_0", "red", 0), agent("red_1", "red", 9), agent("blue_0", "blue", 63)}},
      {"rules", {"tag", {{"name", "max_turns"}, {"params", {{"limit", 60}}}}}},
  };
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures OUTPUT_DIR\n";
    return 2;
  }
  const std::string dir = argv[1];
  write_cross(dir + "/osm_cross.osm");

  const nlohmann::json scenario = v1_scenario();
  std::ofstream(dir + "/v1_scenario.json") << scenario.dump(2) << "\n";

  auto ctx = create_context(parse_config(scenario));
  nlohmann::json positions = nlohmann::json::array();
  while (!ctx->is_terminated()) {
    ctx->step();
    nlohmann::json turn = nlohmann::json::array();
    for (const Agent& a : ctx->agents().all()) turn.push_back(raw(a.current_node()));
    positions.push_back(turn);
  }
  std::ofstream(dir + "/v1_positions.json") << positions.dump() << "\n";

  rec::Recording recording = rec::decode_recording(ctx->finish_recording());
  recording.header.version = 1;
  const Bytes v1 = rec::encode_recording(recording);
  std::ofstream(dir + "/v1_recording.gmar", std::ios::binary)
      .write(reinterpret_cast<const char*>(v1.data()), static_cast<std::streamsize>(v1.size()));
  std::cout << "turns=" << positions.size() << " v1_bytes=" << v1.size() << "\n";
  return 0;
}
