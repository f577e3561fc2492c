#include "roadnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "roadnet/error.hpp"

namespace roadnet {

bool PlanarGraph::has_edge(VertexId u, VertexId v) const {
  if (u >= adjacency_.size() || v >= adjacency_.size()) return false;
  const auto& adj = adjacency_[u];
  return std::binary_search(adj.begin(), adj.end(), v);
}

GraphBuilder::GraphBuilder(const PlanarGraph& g)
    : vertices_(g.vertices_), edges_(g.edges_.begin(), g.edges_.end()), adjacency_(g.adjacency_) {}

VertexId GraphBuilder::add_vertex(Vec2 p) {
  if (!is_finite(p)) {
    throw ValidationError("vertex " + std::to_string(vertices_.size()) + " has a non-finite coordinate");
  }
  vertices_.push_back(p);
  adjacency_.emplace_back();
  return vertices_.size() - 1;
}

bool GraphBuilder::add_edge(VertexId u, VertexId v) {
  const std::size_t n = vertices_.size();
  if (u >= n || v >= n) {
    throw StructuralError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                          ") references a vertex index out of range [0, " + std::to_string(n) + ")");
  }
  if (u == v) throw StructuralError("self loop at vertex " + std::to_string(u));
  if (!edges_.insert(Edge::canonical(u, v)).second) return false;
  adjacency_[u].push_back(v);
  adjacency_[v].push_back(u);
  return true;
}

bool GraphBuilder::has_edge(VertexId u, VertexId v) const {
  return edges_.contains(Edge::canonical(u, v));
}

PlanarGraph GraphBuilder::build() const {
  PlanarGraph g;
  g.vertices_ = vertices_;
  g.edges_.assign(edges_.begin(), edges_.end());
  g.adjacency_ = adjacency_;
  for (auto& adj : g.adjacency_) std::sort(adj.begin(), adj.end());
  return g;
}

PlanarGraph build_graph(std::span<const Vec2> points, std::span<const Edge> edge_pairs) {
  GraphBuilder b;
  for (const Vec2& p : points) b.add_vertex(p);
  for (const Edge& e : edge_pairs) b.add_edge(e.a, e.b);
  return b.build();
}

std::vector<std::size_t> connected_components(const PlanarGraph& g) {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(g.vertex_count(), kUnset);
  std::vector<VertexId> stack;
  std::size_t next = 0;
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      for (VertexId u : g.neighbors(v)) {
        if (label[u] == kUnset) {
          label[u] = next;
          stack.push_back(u);
        }
      }
    }
    ++next;
  }
  return label;
}

std::size_t component_count(const PlanarGraph& g) {
  const auto labels = connected_components(g);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

double total_length(const PlanarGraph& g) {
  double sum = 0.0;
  for (const Edge& e : g.edges()) sum += g.edge_length(e);
  return sum;
}

PlanarGraph remove_isolated(const PlanarGraph& g) {
  constexpr std::size_t kDropped = static_cast<std::size_t>(-1);
  std::vector<std::size_t> remap(g.vertex_count(), kDropped);
  GraphBuilder b;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.degree(v) > 0) remap[v] = b.add_vertex(g.position(v));
  }
  for (const Edge& e : g.edges()) b.add_edge(remap[e.a], remap[e.b]);
  return b.build();
}

PlanarGraph densify(const PlanarGraph& g, double interval) {
  if (!(interval > 0.0)) throw ValidationError("densify interval must be positive");
  GraphBuilder out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) out.add_vertex(g.position(v));
  for (const Edge& e : g.edges()) {
    const Vec2 a = g.position(e.a);
    const Vec2 d = g.position(e.b) - a;
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(g.edge_length(e) / interval - 1e-9)));
    VertexId prev = e.a;
    for (std::size_t k = 1; k < n; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      const VertexId cur = out.add_vertex({a.x + d.x * t, a.y + d.y * t});
      out.add_edge(prev, cur);
      prev = cur;
    }
    out.add_edge(prev, e.b);
  }
  return out.build();
}

}  // namespace roadnet
