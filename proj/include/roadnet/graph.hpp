#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include "roadnet/geometry.hpp"

namespace roadnet {

using VertexId = std::size_t;

/// Unordered vertex pair stored with a < b.
struct Edge {
  VertexId a = 0;
  VertexId b = 0;

  static constexpr Edge canonical(VertexId u, VertexId v) {
    return u < v ? Edge{u, v} : Edge{v, u};
  }
  friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph embedded in pixel space. Immutable once built;
/// use GraphBuilder to derive modified copies.
///
/// Invariants: no self loops, no duplicate edges, every endpoint is a valid
/// vertex index, all coordinates finite, and neighbors(v) lists exactly the
/// edges incident to v (sorted ascending).
class PlanarGraph {
 public:
  PlanarGraph() = default;

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  /// Canonical edges, sorted lexicographically.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const VertexId> neighbors(VertexId v) const { return adjacency_.at(v); }

  Vec2 position(VertexId v) const { return vertices_.at(v); }
  std::size_t degree(VertexId v) const { return adjacency_.at(v).size(); }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return vertices_.empty(); }
  bool has_edge(VertexId u, VertexId v) const;
  double edge_length(const Edge& e) const { return distance(vertices_[e.a], vertices_[e.b]); }

  friend bool operator==(const PlanarGraph& a, const PlanarGraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
  }

 private:
  friend class GraphBuilder;

  std::vector<Vec2> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<VertexId>> adjacency_;
};

/// Incremental construction of a PlanarGraph. Single-threaded.
class GraphBuilder {
 public:
  GraphBuilder() = default;
  explicit GraphBuilder(const PlanarGraph& g);

  /// Throws ValidationError for non-finite coordinates.
  VertexId add_vertex(Vec2 p);
  /// Adds {u, v}; returns false if it already exists. Throws StructuralError
  /// on a self loop or an out-of-range index.
  bool add_edge(VertexId u, VertexId v);

  bool has_edge(VertexId u, VertexId v) const;
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t degree(VertexId v) const { return adjacency_.at(v).size(); }
  std::span<const VertexId> neighbors(VertexId v) const { return adjacency_.at(v); }
  Vec2 position(VertexId v) const { return vertices_.at(v); }

  PlanarGraph build() const;

 private:
  std::vector<Vec2> vertices_;
  std::set<Edge> edges_;
  std::vector<std::vector<VertexId>> adjacency_;
};

/// Builds a graph from points and index pairs. Duplicate pairs (in either
/// orientation) collapse to one edge. Throws StructuralError for self loops
/// and out-of-range indices, ValidationError for non-finite coordinates.
PlanarGraph build_graph(std::span<const Vec2> points, std::span<const Edge> edge_pairs);

/// Component label per vertex, labels dense from 0 in order of first vertex.
std::vector<std::size_t> connected_components(const PlanarGraph& g);
std::size_t component_count(const PlanarGraph& g);

double total_length(const PlanarGraph& g);

/// Drops every degree-0 vertex and renumbers the rest in their original order.
PlanarGraph remove_isolated(const PlanarGraph& g);

/// Splits every edge of length L into ceil(L / interval) equal pieces. The
/// original vertices keep their indices; inserted points follow, edge by edge
/// in edge order, each run ordered from e.a to e.b.
PlanarGraph densify(const PlanarGraph& g, double interval);

}  // namespace roadnet
