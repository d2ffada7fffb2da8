#include "advsim/graph_document.hpp"

#include <fstream>
#include <sstream>

#include "advsim/error.hpp"

namespace advsim {

using nlohmann::json;

json meta_to_json(const MetaMap& meta) {
  json out = json::object();
  for (const auto& [key, value] : meta) {
    std::visit([&](const auto& v) { out[key] = v; }, value);
  }
  return out;
}

MetaMap meta_from_json(const json& j) {
  MetaMap meta;
  if (j.is_null()) return meta;
  if (!j.is_object()) throw Error(ErrorKind::InconsistentDocument, "meta must be an object");
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      meta[key] = value.get<bool>();
    } else if (value.is_number_integer()) {
      meta[key] = value.get<std::int64_t>();
    } else if (value.is_number()) {
      meta[key] = value.get<double>();
    } else if (value.is_string()) {
      meta[key] = value.get<std::string>();
    } else {
      throw Error(ErrorKind::InconsistentDocument, "meta value '" + key + "' is not a scalar");
    }
  }
  return meta;
}

json to_json(const GraphDocument& document) {
  json nodes = json::array();
  for (const Node& node : document.nodes) {
    json n = {{"id", raw(node.id)}, {"x", node.x}, {"y", node.y}};
    if (!node.meta.empty()) n["meta"] = meta_to_json(node.meta);
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const Edge& edge : document.edges) {
    json e = {{"id", raw(edge.id)},
              {"source", raw(edge.source)},
              {"target", raw(edge.target)},
              {"length", edge.length}};
    if (!edge.linestring.empty()) {
      json line = json::array();
      for (const Point& p : edge.linestring) line.push_back({p.x, p.y});
      e["linestring"] = std::move(line);
    }
    edges.push_back(std::move(e));
  }
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

GraphDocument graph_document_from_json(const json& j) {
  GraphDocument document;
  try {
    for (const json& n : j.at("nodes")) {
      Node node;
      node.id = NodeId{n.at("id").get<std::uint64_t>()};
      node.x = n.at("x").get<double>();
      node.y = n.at("y").get<double>();
      if (n.contains("meta")) node.meta = meta_from_json(n.at("meta"));
      document.nodes.push_back(std::move(node));
    }
    for (const json& e : j.at("edges")) {
      Edge edge;
      edge.id = EdgeId{e.at("id").get<std::uint64_t>()};
      edge.source = NodeId{e.at("source").get<std::uint64_t>()};
      edge.target = NodeId{e.at("target").get<std::uint64_t>()};
      edge.length = e.at("length").get<double>();
      if (e.contains("linestring") && !e.at("linestring").is_null()) {
        for (const json& p : e.at("linestring")) {
          edge.linestring.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
      }
      document.edges.push_back(std::move(edge));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InconsistentDocument, e.what());
  }
  return document;
}

std::string dump_graph_document(const GraphDocument& document) {
  return to_json(document).dump(2) + "\n";
}

GraphDocument parse_graph_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InconsistentDocument, e.what());
  }
  return graph_document_from_json(j);
}

GraphDocument load_graph_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_graph_document(buffer.str());
}

void save_graph_document(const GraphDocument& document, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << dump_graph_document(document);
}

}  // namespace advsim
