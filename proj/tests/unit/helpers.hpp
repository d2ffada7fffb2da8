#pragma once

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "advsim/error.hpp"
#include "advsim/graph.hpp"
#include "advsim/rng.hpp"

#define EXPECT_ERROR_KIND(stmt, expected_kind)                                   \
  do {                                                                           \
    try {                                                                        \
      stmt;                                                                      \
      ADD_FAILURE() << "expected " #expected_kind " from " #stmt;                \
    } catch (const ::advsim::Error& e) {                                         \
      EXPECT_EQ(e.kind(), ::advsim::ErrorKind::expected_kind) << e.what();       \
    }                                                                            \
  } while (0)

namespace testutil {

inline std::string fixture(const std::string& name) { return std::string(ADVSIM_FIXTURES) + "/" + name; }

inline advsim::Edge straight(const advsim::Graph& g, std::uint64_t id, std::uint64_t s, std::uint64_t t) {
  const advsim::Node& a = g.node(advsim::NodeId{s});
  const advsim::Node& b = g.node(advsim::NodeId{t});
  return {advsim::EdgeId{id}, a.id, b.id, std::hypot(b.x - a.x, b.y - a.y), {{a.x, a.y}, {b.x, b.y}}};
}

/// Random planar graph: n nodes with sparse ids in a 500 m square, about
/// 3n random directed edges.
inline advsim::Graph random_graph(advsim::Rng& rng, std::size_t n) {
  advsim::Graph g;
  std::uint64_t id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    id += 1 + rng.uniform_index(3);
    g.add_node({advsim::NodeId{id}, rng.uniform01() * 500.0, rng.uniform01() * 500.0, {}});
  }
  std::vector<advsim::NodeId> ids;
  for (const auto& [nid, node] : g.nodes()) ids.push_back(nid);
  std::uint64_t edge = 0;
  for (std::size_t k = 0; k < 3 * n; ++k) {
    const advsim::NodeId a = ids[rng.uniform_index(ids.size())];
    const advsim::NodeId b = ids[rng.uniform_index(ids.size())];
    if (a == b) continue;
    g.add_edge(straight(g, edge++, advsim::raw(a), advsim::raw(b)));
  }
  return g;
}

}  // namespace testutil
