#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace advsim {

enum class NodeId : std::uint64_t {};
enum class EdgeId : std::uint64_t {};

constexpr std::uint64_t raw(NodeId id) noexcept { return static_cast<std::uint64_t>(id); }
constexpr std::uint64_t raw(EdgeId id) noexcept { return static_cast<std::uint64_t>(id); }

using MetaValue = std::variant<std::int64_t, double, bool, std::string>;
using MetaMap = std::map<std::string, MetaValue>;

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct Node {
  NodeId id{};
  double x = 0.0;  // planar meters
  double y = 0.0;
  MetaMap meta;
  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  EdgeId id{};
  NodeId source{};
  NodeId target{};
  double length = 0.0;              // meters, > 0
  std::vector<Point> linestring;    // optional render geometry
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  EdgeId edge;
  NodeId target;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Node coordinates laid out as parallel arrays in ascending node id order,
/// the input format of the geometry kernels.
struct CoordinateTable {
  std::vector<NodeId> ids;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct GraphDocument;

/// Mutable directed graph with planar coordinates.
///
/// Ids are caller-assigned. Outgoing adjacency lists are kept sorted by edge
/// id so neighbor order is deterministic. Bidirectional roads are two edges.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph& other);
  Graph& operator=(const Graph& other);
  Graph(Graph&& other) noexcept;
  Graph& operator=(Graph&& other) noexcept;

  void add_node(Node node);
  void add_edge(Edge edge);
  void remove_node(NodeId id);
  void remove_edge(EdgeId id);
  void set_node_meta(NodeId id, const std::string& key, MetaValue value);
  void clear();

  bool has_node(NodeId id) const { return nodes_.contains(id); }
  bool has_edge(EdgeId id) const { return edges_.contains(id); }
  const Node& node(NodeId id) const;
  const Edge& edge(EdgeId id) const;

  /// Outgoing edges of `id`, ascending edge id.
  std::vector<Neighbor> neighbors(NodeId id) const;
  /// Edge ids only; no allocation.
  std::span<const EdgeId> out_edges(NodeId id) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::map<NodeId, Node>& nodes() const { return nodes_; }
  const std::map<EdgeId, Edge>& edges() const { return edges_; }

  /// Bumped by every mutation.
  std::uint64_t version() const { return version_; }

  /// Cached SoA view of node coordinates; rebuilt lazily after mutation.
  std::shared_ptr<const CoordinateTable> coordinates() const;

  /// Replaces the whole graph with the document contents. Strong guarantee.
  void bulk_attach(const GraphDocument& document);
  GraphDocument export_document() const;

  /// Full cross-scan of adjacency against the edge set.
  bool check_consistency() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  void touch();

  std::map<NodeId, Node> nodes_;
  std::map<EdgeId, Edge> edges_;
  std::map<NodeId, std::vector<EdgeId>> outgoing_;
  std::map<NodeId, std::set<EdgeId>> incoming_;
  std::uint64_t version_ = 0;

  mutable std::mutex cache_mutex_;
  mutable std::shared_ptr<const CoordinateTable> coordinates_;
};

}  // namespace advsim
