#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "roadnet/adjacency.hpp"
#include "roadnet/graph.hpp"

namespace roadnet {

struct ExpandParams {
  double d_merge = 10.0;  ///< merge radius, pixels
  /// Threshold for a prediction to merge into an existing vertex.
  double t_valid = 0.5;
  /// Higher threshold a prediction must also pass to insert a new vertex.
  double t_valid_expand = 0.7;
  int iterations = 3;
  /// Predictions within this angle of an existing incident edge are ignored.
  double back_edge_angle_deg = 15.0;
  /// Also grow from degree-0 vertices (expansion-only mode).
  bool include_isolated = false;
  /// Optional cap on the degree expansion may give a frontier vertex.
  std::optional<std::size_t> max_inserted_degree;

  void validate() const;
};

struct ExpandIterationStats {
  std::size_t frontier = 0;
  std::size_t insertions = 0;
  std::size_t merges = 0;

  bool changed() const { return insertions + merges > 0; }
  friend bool operator==(const ExpandIterationStats&, const ExpandIterationStats&) = default;
};

struct ExpandStats {
  std::vector<ExpandIterationStats> iterations;
  ExpandIterationStats totals() const;
};

/// Degree-1 vertices (plus degree-0 ones when `include_isolated`), ascending.
std::vector<VertexId> frontier(const PlanarGraph& g, bool include_isolated = false);

/// One growth pass. Frontier vertices are taken from `g` and processed in
/// ascending order; each gets its predictions filtered at t_valid. A valid
/// point is skipped when it points back along an existing incident edge.
/// Otherwise, if the nearest vertex within d_merge is some u != v, the edge
/// (v, u) is added (merge); if no vertex is within d_merge and the point
/// also passes t_valid_expand, a new vertex is inserted there and linked to v.
/// A point whose nearest vertex is v itself is discarded. Vertices inserted
/// during the pass are visible to later merges in the same pass but only
/// join the frontier on the next pass.
std::pair<PlanarGraph, ExpandIterationStats> expand_once(const PlanarGraph& g, const Predictor& predictor,
                                                         const ExpandParams& params, std::size_t threads = 1);

/// Applies expand_once up to params.iterations times, stopping after the
/// first pass that changes nothing.
std::pair<PlanarGraph, ExpandStats> expand(const PlanarGraph& g, const Predictor& predictor,
                                           const ExpandParams& params, std::size_t threads = 1);

}  // namespace roadnet
