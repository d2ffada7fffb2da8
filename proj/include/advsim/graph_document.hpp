#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "advsim/graph.hpp"

namespace advsim {

/// Portable node/edge list interchange format (JSON):
///   {"nodes":[{"id","x","y","meta"}...],
///    "edges":[{"id","source","target","length","linestring"}...]}
struct GraphDocument {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  friend bool operator==(const GraphDocument&, const GraphDocument&) = default;
};

nlohmann::json to_json(const GraphDocument& document);
GraphDocument graph_document_from_json(const nlohmann::json& json);

/// Deterministic serialization (two-space indent, trailing newline).
std::string dump_graph_document(const GraphDocument& document);
GraphDocument parse_graph_document(const std::string& text);

GraphDocument load_graph_document(const std::string& path);
void save_graph_document(const GraphDocument& document, const std::string& path);

nlohmann::json meta_to_json(const MetaMap& meta);
MetaMap meta_from_json(const nlohmann::json& json);

}  // namespace advsim
