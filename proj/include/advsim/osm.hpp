#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "advsim/graph.hpp"
#include "advsim/graph_document.hpp"

namespace advsim::osm {

struct LatLon {
  double lat = 0.0;  // degrees
  double lon = 0.0;
};

struct RawWay {
  std::uint64_t id = 0;
  std::vector<std::uint64_t> refs;
  std::string highway;
  bool oneway = false;
};

struct RawRoadNetwork {
  std::map<std::uint64_t, LatLon> points;
  std::vector<RawWay> ways;
};

struct IngestConfig {
  double resolution = 10.0;                      // max node spacing, meters
  std::optional<double> consolidation_tolerance;  // defaults to resolution / 2
  std::set<std::string> allowed_highway_classes;  // empty accepts every highway
  bool respect_oneway = true;

  double tolerance() const { return consolidation_tolerance.value_or(resolution / 2.0); }
};

struct PlanarWay {
  std::uint64_t id = 0;
  std::vector<std::uint64_t> refs;
  bool oneway = false;
};

/// Road network after projection: planar points plus ways. `inserted` holds
/// the ids added by resampling, which consolidation never touches.
struct PlanarNetwork {
  std::map<std::uint64_t, Point> points;
  std::vector<PlanarWay> ways;
  std::set<std::uint64_t> inserted;
};

constexpr double kEarthRadius = 6'371'000.0;

/// Parses OSM XML. Ways without a highway tag, or whose class is not in
/// `allowed` (when non-empty), are dropped.
RawRoadNetwork parse_osm_xml(std::string_view bytes, const std::set<std::string>& allowed = {});

/// Local equirectangular projection around the origin.
Point project(double lat, double lon, double origin_lat, double origin_lon);

/// Centroid of all parsed points, used as the projection origin.
LatLon centroid(const RawRoadNetwork& network);

/// Projects the points referenced by ways; unreferenced points are dropped.
PlanarNetwork project_network(const RawRoadNetwork& network, LatLon origin);

PlanarNetwork consolidate_intersections(const PlanarNetwork& network, double tolerance);
PlanarNetwork resample_edges(const PlanarNetwork& network, double resolution);

/// project -> consolidate -> resample -> emit.
GraphDocument build_graph(const RawRoadNetwork& network, const IngestConfig& config);

/// Reads a file and runs parse + build_graph.
GraphDocument graph_from_xml_file(const std::string& path, const IngestConfig& config);

}  // namespace advsim::osm
