#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "roadnet/graph.hpp"

namespace testutil {

using roadnet::Edge;
using roadnet::PlanarGraph;
using roadnet::Vec2;

/// Random simple graph with `n` vertices on a grid of integer points
/// (distinct), roughly `m` edges between points at most `max_len` apart.
inline PlanarGraph random_graph(std::uint64_t seed, std::size_t n, std::size_t m, double extent = 400.0,
                                double max_len = 120.0) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coord(8, static_cast<int>(extent) - 8);
  std::set<std::pair<int, int>> used;
  std::vector<Vec2> pts;
  while (pts.size() < n) {
    const int x = coord(rng), y = coord(rng);
    if (used.insert({x, y}).second) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
  }
  std::vector<Edge> edges;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t tries = 0; edges.size() < m && tries < 50 * m; ++tries) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (a == b || roadnet::distance(pts[a], pts[b]) > max_len) continue;
    edges.push_back(Edge::canonical(a, b));
  }
  return roadnet::build_graph(pts, edges);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("roadnet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(ROADNET_FIXTURE_DIR) / name;
}

/// Edge set mapped to vertex positions rounded to 1e-6 px.
inline std::set<std::pair<std::pair<long long, long long>, std::pair<long long, long long>>> edge_positions(
    const PlanarGraph& g) {
  auto key = [](Vec2 p) { return std::pair{std::llround(p.x * 1e6), std::llround(p.y * 1e6)}; };
  std::set<std::pair<std::pair<long long, long long>, std::pair<long long, long long>>> out;
  for (const Edge& e : g.edges()) {
    auto a = key(g.position(e.a)), b = key(g.position(e.b));
    if (b < a) std::swap(a, b);
    out.insert({a, b});
  }
  return out;
}

/// Vertex correspondence: every vertex of `a` has exactly one vertex of `b`
/// within `tol` and the mapping is a bijection. Returns the map a -> b, or an
/// empty vector when no such bijection exists.
inline std::vector<std::size_t> match_vertices(const PlanarGraph& a, const PlanarGraph& b, double tol) {
  if (a.vertex_count() != b.vertex_count()) return {};
  std::vector<std::size_t> map(a.vertex_count());
  std::vector<char> taken(b.vertex_count(), 0);
  for (std::size_t i = 0; i < a.vertex_count(); ++i) {
    std::size_t found = b.vertex_count(), hits = 0;
    for (std::size_t j = 0; j < b.vertex_count(); ++j)
      if (roadnet::distance(a.position(i), b.position(j)) <= tol) {
        found = j;
        ++hits;
      }
    if (hits != 1 || taken[found]) return {};
    taken[found] = 1;
    map[i] = found;
  }
  return map;
}

/// True when the edge sets agree under the vertex map.
inline bool same_edges_under(const PlanarGraph& a, const PlanarGraph& b, const std::vector<std::size_t>& map) {
  if (a.edge_count() != b.edge_count()) return false;
  for (const Edge& e : a.edges())
    if (!b.has_edge(map[e.a], map[e.b])) return false;
  return true;
}

}  // namespace testutil
