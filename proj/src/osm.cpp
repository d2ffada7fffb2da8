#include "advsim/osm.hpp"

#include <expat.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>

#include "advsim/error.hpp"

namespace advsim::osm {

namespace {

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

const char* find_attr(const XML_Char** attrs, std::string_view name) {
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    if (name == attrs[i]) return attrs[i + 1];
  }
  return nullptr;
}

struct ParseState {
  XML_Parser parser = nullptr;
  const std::set<std::string>* allowed = nullptr;
  RawRoadNetwork network;
  std::optional<RawWay> way;
  bool way_has_highway = false;
  bool reverse_way = false;
  std::optional<Error> error;

  unsigned long line() const { return XML_GetCurrentLineNumber(parser); }

  void fail(ErrorKind kind, const std::string& detail) {
    if (!error) error.emplace(kind, detail);
    XML_StopParser(parser, XML_FALSE);
  }
};

std::optional<std::uint64_t> parse_id(const char* text) {
  if (text == nullptr) return std::nullopt;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text, &end, 10);
  if (end == text || *end != '\0') return std::nullopt;
  return value;
}

std::optional<double> parse_degrees(const char* text) {
  if (text == nullptr) return std::nullopt;
  char* end = nullptr;
  const double value = std::strtod(text, &end);
  if (end == text || *end != '\0' || !std::isfinite(value)) return std::nullopt;
  return value;
}

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto& s = *static_cast<ParseState*>(user);
  const std::string_view element(name);
  if (element == "node") {
    const auto id = parse_id(find_attr(attrs, "id"));
    if (!id) return s.fail(ErrorKind::MalformedXml, "node without id at line " + std::to_string(s.line()));
    const auto lat = parse_degrees(find_attr(attrs, "lat"));
    const auto lon = parse_degrees(find_attr(attrs, "lon"));
    if (!lat || !lon) return s.fail(ErrorKind::MissingCoordinate, "node " + std::to_string(*id));
    if (*lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0) {
      return s.fail(ErrorKind::MalformedXml,
                    "node " + std::to_string(*id) + " coordinates out of range at line " + std::to_string(s.line()));
    }
    s.network.points[*id] = {*lat, *lon};
  } else if (element == "way") {
    const auto id = parse_id(find_attr(attrs, "id"));
    if (!id) return s.fail(ErrorKind::MalformedXml, "way without id at line " + std::to_string(s.line()));
    s.way = RawWay{*id, {}, {}, false};
    s.way_has_highway = false;
    s.reverse_way = false;
  } else if (element == "nd" && s.way) {
    const auto ref = parse_id(find_attr(attrs, "ref"));
    if (!ref) return s.fail(ErrorKind::MalformedXml, "nd without ref at line " + std::to_string(s.line()));
    s.way->refs.push_back(*ref);
  } else if (element == "tag" && s.way) {
    const char* k = find_attr(attrs, "k");
    const char* v = find_attr(attrs, "v");
    if (k == nullptr || v == nullptr) return;
    const std::string_view key(k);
    const std::string_view value(v);
    if (key == "highway") {
      s.way->highway = value;
      s.way_has_highway = true;
    } else if (key == "oneway") {
      s.way->oneway = value == "yes" || value == "true" || value == "1" || value == "-1";
      s.reverse_way = value == "-1";
    }
  }
}

void on_end(void* user, const XML_Char* name) {
  auto& s = *static_cast<ParseState*>(user);
  if (std::string_view(name) != "way" || !s.way) return;
  RawWay way = std::move(*s.way);
  s.way.reset();
  if (!s.way_has_highway) return;
  if (!s.allowed->empty() && !s.allowed->contains(way.highway)) return;
  if (s.reverse_way) std::reverse(way.refs.begin(), way.refs.end());
  s.network.ways.push_back(std::move(way));
}

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Disjoint-set forest over dense indices.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<std::uint64_t> dedup_consecutive(std::vector<std::uint64_t> refs) {
  refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
  return refs;
}

}  // namespace

RawRoadNetwork parse_osm_xml(std::string_view bytes, const std::set<std::string>& allowed) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate(nullptr),
                                                                                     &XML_ParserFree);
  ParseState state;
  state.parser = parser.get();
  state.allowed = &allowed;
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), &on_start, &on_end);

  const auto status = XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE);
  if (state.error) throw *state.error;
  if (status != XML_STATUS_OK) {
    throw Error(ErrorKind::MalformedXml, std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) + " at line " +
                                             std::to_string(XML_GetCurrentLineNumber(parser.get())));
  }
  for (const RawWay& way : state.network.ways) {
    for (std::uint64_t ref : way.refs) {
      if (!state.network.points.contains(ref)) {
        throw Error(ErrorKind::MissingCoordinate,
                    "node " + std::to_string(ref) + " referenced by way " + std::to_string(way.id));
      }
    }
  }
  return std::move(state.network);
}

Point project(double lat, double lon, double origin_lat, double origin_lon) {
  return {kEarthRadius * radians(lon - origin_lon) * std::cos(radians(origin_lat)),
          kEarthRadius * radians(lat - origin_lat)};
}

LatLon centroid(const RawRoadNetwork& network) {
  if (network.points.empty()) return {};
  double lat = 0.0;
  double lon = 0.0;
  for (const auto& [id, p] : network.points) {
    lat += p.lat;
    lon += p.lon;
  }
  const auto n = static_cast<double>(network.points.size());
  return {lat / n, lon / n};
}

PlanarNetwork project_network(const RawRoadNetwork& network, LatLon origin) {
  PlanarNetwork out;
  for (const RawWay& way : network.ways) {
    for (std::uint64_t ref : way.refs) {
      const LatLon& p = network.points.at(ref);
      out.points.try_emplace(ref, project(p.lat, p.lon, origin.lat, origin.lon));
    }
    out.ways.push_back({way.id, way.refs, way.oneway});
  }
  return out;
}

PlanarNetwork consolidate_intersections(const PlanarNetwork& network, double tolerance) {
  // Candidates are original nodes, sorted by x for a sweep over the tolerance band.
  std::vector<std::uint64_t> ids;
  for (const auto& [id, p] : network.points) {
    if (!network.inserted.contains(id)) ids.push_back(id);
  }
  std::vector<std::size_t> by_x(ids.size());
  std::iota(by_x.begin(), by_x.end(), std::size_t{0});
  std::stable_sort(by_x.begin(), by_x.end(), [&](std::size_t a, std::size_t b) {
    return network.points.at(ids[a]).x < network.points.at(ids[b]).x;
  });

  UnionFind clusters(ids.size());
  for (std::size_t i = 0; i < by_x.size(); ++i) {
    const Point& a = network.points.at(ids[by_x[i]]);
    for (std::size_t j = i + 1; j < by_x.size(); ++j) {
      const Point& b = network.points.at(ids[by_x[j]]);
      if (b.x - a.x > tolerance) break;
      if (distance(a, b) <= tolerance) clusters.unite(by_x[i], by_x[j]);
    }
  }

  // Root index is the smallest index, i.e. the smallest id of the cluster.
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < ids.size(); ++i) members[clusters.find(i)].push_back(i);

  PlanarNetwork out;
  out.inserted = network.inserted;
  std::map<std::uint64_t, std::uint64_t> remap;
  for (const auto& [root, group] : members) {
    double x = 0.0;
    double y = 0.0;
    for (std::size_t i : group) {
      x += network.points.at(ids[i]).x;
      y += network.points.at(ids[i]).y;
      remap[ids[i]] = ids[root];
    }
    const auto n = static_cast<double>(group.size());
    out.points[ids[root]] = {x / n, y / n};
  }
  for (std::uint64_t id : network.inserted) {
    if (auto it = network.points.find(id); it != network.points.end()) out.points[id] = it->second;
  }

  for (const PlanarWay& way : network.ways) {
    PlanarWay merged{way.id, {}, way.oneway};
    for (std::uint64_t ref : way.refs) {
      auto it = remap.find(ref);
      merged.refs.push_back(it == remap.end() ? ref : it->second);
    }
    merged.refs = dedup_consecutive(std::move(merged.refs));
    if (merged.refs.size() >= 2) out.ways.push_back(std::move(merged));
  }
  return out;
}

PlanarNetwork resample_edges(const PlanarNetwork& network, double resolution) {
  if (!(resolution > 0.0)) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
  PlanarNetwork out;
  out.points = network.points;
  out.inserted = network.inserted;

  std::uint64_t next_id = network.points.empty() ? 0 : network.points.rbegin()->first + 1;
  // Interior chain per undirected segment so shared segments reuse their nodes.
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<std::uint64_t>> chains;

  for (const PlanarWay& way : network.ways) {
    PlanarWay dense{way.id, {}, way.oneway};
    if (!way.refs.empty()) dense.refs.push_back(way.refs.front());
    for (std::size_t i = 1; i < way.refs.size(); ++i) {
      const std::uint64_t a = way.refs[i - 1];
      const std::uint64_t b = way.refs[i];
      const auto key = std::minmax(a, b);
      auto found = chains.find(key);
      if (found == chains.end()) {
        const Point& pa = out.points.at(key.first);
        const Point& pb = out.points.at(key.second);
        const double length = distance(pa, pb);
        const auto k = static_cast<std::uint64_t>(std::max(1.0, std::ceil(length / resolution)));
        std::vector<std::uint64_t> chain;
        for (std::uint64_t step = 1; step < k; ++step) {
          const double t = static_cast<double>(step) / static_cast<double>(k);
          const std::uint64_t id = next_id++;
          out.points[id] = {pa.x + (pb.x - pa.x) * t, pa.y + (pb.y - pa.y) * t};
          out.inserted.insert(id);
          chain.push_back(id);
        }
        found = chains.emplace(key, std::move(chain)).first;
      }
      const auto& chain = found->second;
      if (a == key.first) {
        dense.refs.insert(dense.refs.end(), chain.begin(), chain.end());
      } else {
        dense.refs.insert(dense.refs.end(), chain.rbegin(), chain.rend());
      }
      dense.refs.push_back(b);
    }
    out.ways.push_back(std::move(dense));
  }
  return out;
}

GraphDocument build_graph(const RawRoadNetwork& network, const IngestConfig& config) {
  if (!(config.resolution > 0.0)) throw Error(ErrorKind::InvalidArgument, "resolution must be positive");
  if (config.tolerance() < 0.0) throw Error(ErrorKind::InvalidArgument, "consolidation tolerance must be >= 0");

  RawRoadNetwork filtered;
  filtered.points = network.points;
  for (const RawWay& way : network.ways) {
    if (!config.allowed_highway_classes.empty() && !config.allowed_highway_classes.contains(way.highway)) continue;
    if (way.refs.size() >= 2) filtered.ways.push_back(way);
  }
  if (filtered.ways.empty()) throw Error(ErrorKind::EmptyNetwork, "no ways survive filtering");

  PlanarNetwork planar = project_network(filtered, centroid(network));
  planar = consolidate_intersections(planar, config.tolerance());
  planar = resample_edges(planar, config.resolution);
  if (planar.ways.empty()) throw Error(ErrorKind::EmptyNetwork, "all ways collapsed during consolidation");

  // Undirected segments in first-seen order with the directions they allow.
  struct Segment {
    std::uint64_t a;
    std::uint64_t b;
    bool forward;
    bool backward;
  };
  std::vector<Segment> segments;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> index;
  std::set<std::uint64_t> used;
  for (const PlanarWay& way : planar.ways) {
    const bool one_direction = config.respect_oneway && way.oneway;
    for (std::size_t i = 1; i < way.refs.size(); ++i) {
      const std::uint64_t a = way.refs[i - 1];
      const std::uint64_t b = way.refs[i];
      used.insert(a);
      used.insert(b);
      auto [it, fresh] = index.try_emplace(std::minmax(a, b), segments.size());
      if (fresh) {
        segments.push_back({a, b, true, !one_direction});
        continue;
      }
      Segment& s = segments[it->second];
      const bool same = s.a == a;
      (same ? s.forward : s.backward) = true;
      if (!one_direction) (same ? s.backward : s.forward) = true;
    }
  }

  GraphDocument document;
  for (std::uint64_t id : used) {
    const Point& p = planar.points.at(id);
    document.nodes.push_back({NodeId{id}, p.x, p.y, {}});
  }
  std::uint64_t edge_id = 0;
  auto emit = [&](std::uint64_t from, std::uint64_t to) {
    const Point& p = planar.points.at(from);
    const Point& q = planar.points.at(to);
    document.edges.push_back({EdgeId{edge_id++}, NodeId{from}, NodeId{to}, distance(p, q), {p, q}});
  };
  for (const Segment& s : segments) {
    if (s.forward) emit(s.a, s.b);
    if (s.backward) emit(s.b, s.a);
  }
  return document;
}

GraphDocument graph_from_xml_file(const std::string& path, const IngestConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  return build_graph(parse_osm_xml(bytes, config.allowed_highway_classes), config);
}

}  // namespace advsim::osm
