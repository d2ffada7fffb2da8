#include "advsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "advsim/error.hpp"
#include "advsim/graph_document.hpp"

namespace advsim {

namespace {

std::string node_label(NodeId id) { return "node " + std::to_string(raw(id)); }
std::string edge_label(EdgeId id) { return "edge " + std::to_string(raw(id)); }

double polyline_length(const std::vector<Point>& points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  }
  return total;
}

}  // namespace

Graph::Graph(const Graph& other)
    : nodes_(other.nodes_),
      edges_(other.edges_),
      outgoing_(other.outgoing_),
      incoming_(other.incoming_),
      version_(other.version_) {}

Graph& Graph::operator=(const Graph& other) {
  if (this != &other) {
    nodes_ = other.nodes_;
    edges_ = other.edges_;
    outgoing_ = other.outgoing_;
    incoming_ = other.incoming_;
    touch();
  }
  return *this;
}

Graph::Graph(Graph&& other) noexcept
    : nodes_(std::move(other.nodes_)),
      edges_(std::move(other.edges_)),
      outgoing_(std::move(other.outgoing_)),
      incoming_(std::move(other.incoming_)),
      version_(other.version_) {
  other.touch();
}

Graph& Graph::operator=(Graph&& other) noexcept {
  if (this != &other) {
    nodes_ = std::move(other.nodes_);
    edges_ = std::move(other.edges_);
    outgoing_ = std::move(other.outgoing_);
    incoming_ = std::move(other.incoming_);
    touch();
    other.touch();
  }
  return *this;
}

void Graph::touch() {
  ++version_;
  std::lock_guard lock(cache_mutex_);
  coordinates_.reset();
}

void Graph::add_node(Node node) {
  if (!std::isfinite(node.x) || !std::isfinite(node.y)) {
    throw Error(ErrorKind::InvalidNode, node_label(node.id) + " has non-finite coordinates");
  }
  if (nodes_.contains(node.id)) throw Error(ErrorKind::DuplicateNode, node_label(node.id));
  const NodeId id = node.id;
  nodes_.emplace(id, std::move(node));
  outgoing_[id];
  incoming_[id];
  touch();
}

void Graph::add_edge(Edge edge) {
  if (edges_.contains(edge.id)) throw Error(ErrorKind::DuplicateEdge, edge_label(edge.id));
  auto source = nodes_.find(edge.source);
  auto target = nodes_.find(edge.target);
  if (source == nodes_.end() || target == nodes_.end()) {
    const NodeId missing = source == nodes_.end() ? edge.source : edge.target;
    throw Error(ErrorKind::MissingEndpoint, edge_label(edge.id) + " references absent " + node_label(missing));
  }
  if (!(edge.length > 0.0) || !std::isfinite(edge.length)) {
    throw Error(ErrorKind::InvalidEdge, edge_label(edge.id) + " length must be positive");
  }
  if (!edge.linestring.empty()) {
    const Point head{source->second.x, source->second.y};
    const Point tail{target->second.x, target->second.y};
    if (edge.linestring.size() < 2 || edge.linestring.front() != head || edge.linestring.back() != tail) {
      throw Error(ErrorKind::InvalidEdge, edge_label(edge.id) + " linestring endpoints differ from its nodes");
    }
    const double arc = polyline_length(edge.linestring);
    if (std::abs(arc - edge.length) > 1e-6 * edge.length) {
      throw Error(ErrorKind::InvalidEdge, edge_label(edge.id) + " linestring arc length differs from length");
    }
  }
  const EdgeId id = edge.id;
  auto& out = outgoing_[edge.source];
  out.insert(std::upper_bound(out.begin(), out.end(), id), id);
  incoming_[edge.target].insert(id);
  edges_.emplace(id, std::move(edge));
  touch();
}

void Graph::remove_edge(EdgeId id) {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw Error(ErrorKind::UnknownEdge, edge_label(id));
  auto& out = outgoing_[it->second.source];
  out.erase(std::lower_bound(out.begin(), out.end(), id));
  incoming_[it->second.target].erase(id);
  edges_.erase(it);
  touch();
}

void Graph::remove_node(NodeId id) {
  if (!nodes_.contains(id)) throw Error(ErrorKind::UnknownNode, node_label(id));
  std::set<EdgeId> incident(incoming_[id]);
  incident.insert(outgoing_[id].begin(), outgoing_[id].end());
  for (EdgeId e : incident) remove_edge(e);
  outgoing_.erase(id);
  incoming_.erase(id);
  nodes_.erase(id);
  touch();
}

void Graph::set_node_meta(NodeId id, const std::string& key, MetaValue value) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorKind::UnknownNode, node_label(id));
  it->second.meta[key] = std::move(value);
  touch();
}

void Graph::clear() {
  nodes_.clear();
  edges_.clear();
  outgoing_.clear();
  incoming_.clear();
  touch();
}

const Node& Graph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorKind::UnknownNode, node_label(id));
  return it->second;
}

const Edge& Graph::edge(EdgeId id) const {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw Error(ErrorKind::UnknownEdge, edge_label(id));
  return it->second;
}

std::span<const EdgeId> Graph::out_edges(NodeId id) const {
  auto it = outgoing_.find(id);
  if (it == outgoing_.end()) throw Error(ErrorKind::UnknownNode, node_label(id));
  return it->second;
}

std::vector<Neighbor> Graph::neighbors(NodeId id) const {
  std::vector<Neighbor> result;
  for (EdgeId e : out_edges(id)) result.push_back({e, edges_.at(e).target});
  return result;
}

std::shared_ptr<const CoordinateTable> Graph::coordinates() const {
  std::lock_guard lock(cache_mutex_);
  if (!coordinates_) {
    auto table = std::make_shared<CoordinateTable>();
    table->ids.reserve(nodes_.size());
    table->xs.reserve(nodes_.size());
    table->ys.reserve(nodes_.size());
    for (const auto& [id, node] : nodes_) {
      table->ids.push_back(id);
      table->xs.push_back(node.x);
      table->ys.push_back(node.y);
    }
    coordinates_ = std::move(table);
  }
  return coordinates_;
}

void Graph::bulk_attach(const GraphDocument& document) {
  Graph fresh;
  for (const Node& node : document.nodes) {
    try {
      fresh.add_node(node);
    } catch (const Error& e) {
      throw Error(ErrorKind::InconsistentDocument, e.what());
    }
  }
  for (const Edge& edge : document.edges) {
    try {
      fresh.add_edge(edge);
    } catch (const Error& e) {
      throw Error(ErrorKind::InconsistentDocument, "first offending " + edge_label(edge.id) + ": " + e.what());
    }
  }
  nodes_ = std::move(fresh.nodes_);
  edges_ = std::move(fresh.edges_);
  outgoing_ = std::move(fresh.outgoing_);
  incoming_ = std::move(fresh.incoming_);
  touch();
}

GraphDocument Graph::export_document() const {
  GraphDocument document;
  document.nodes.reserve(nodes_.size());
  document.edges.reserve(edges_.size());
  for (const auto& [id, node] : nodes_) document.nodes.push_back(node);
  for (const auto& [id, edge] : edges_) document.edges.push_back(edge);
  return document;
}

bool Graph::check_consistency() const {
  if (outgoing_.size() != nodes_.size() || incoming_.size() != nodes_.size()) return false;
  std::size_t listed = 0;
  for (const auto& [node, out] : outgoing_) {
    if (!nodes_.contains(node) || !std::is_sorted(out.begin(), out.end())) return false;
    for (EdgeId e : out) {
      auto it = edges_.find(e);
      if (it == edges_.end() || it->second.source != node) return false;
    }
    listed += out.size();
  }
  std::size_t incoming = 0;
  for (const auto& [node, in] : incoming_) {
    for (EdgeId e : in) {
      auto it = edges_.find(e);
      if (it == edges_.end() || it->second.target != node) return false;
    }
    incoming += in.size();
  }
  if (listed != edges_.size() || incoming != edges_.size()) return false;
  for (const auto& [id, edge] : edges_) {
    if (!nodes_.contains(edge.source) || !nodes_.contains(edge.target)) return false;
  }
  return true;
}

}  // namespace advsim
