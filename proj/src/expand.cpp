#include "roadnet/expand.hpp"

#include <cmath>
#include <string>

#include "roadnet/error.hpp"
#include "roadnet/spatial_index.hpp"

namespace roadnet {

void ExpandParams::validate() const {
  if (!(d_merge > 0.0)) throw ValidationError("d_merge must be positive");
  if (!(t_valid > 0.0 && t_valid <= t_valid_expand && t_valid_expand <= 1.0))
    throw ValidationError("expansion thresholds must satisfy 0 < t_valid <= t_valid_expand <= 1");
  if (iterations < 0) throw ValidationError("iterations must be >= 0");
  if (!(back_edge_angle_deg >= 0.0 && back_edge_angle_deg <= 180.0))
    throw ValidationError("back_edge_angle_deg must be in [0, 180]");
}

ExpandIterationStats ExpandStats::totals() const {
  ExpandIterationStats t;
  for (const auto& s : iterations) {
    t.frontier += s.frontier;
    t.insertions += s.insertions;
    t.merges += s.merges;
  }
  return t;
}

std::vector<VertexId> frontier(const PlanarGraph& g, bool include_isolated) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const std::size_t deg = g.degree(v);
    if (deg == 1 || (include_isolated && deg == 0)) out.push_back(v);
  }
  return out;
}

std::pair<PlanarGraph, ExpandIterationStats> expand_once(const PlanarGraph& g, const Predictor& predictor,
                                                         const ExpandParams& params, std::size_t threads) {
  params.validate();
  const std::vector<VertexId> front = frontier(g, params.include_isolated);
  ExpandIterationStats stats;
  stats.frontier = front.size();
  if (front.empty()) return {g, stats};

  std::vector<Vec2> queries;
  queries.reserve(front.size());
  for (VertexId v : front) queries.push_back(g.position(v));

  std::vector<AdjacencyPrediction> preds;
  try {
    preds = predictor.predict(queries, threads);
  } catch (const LookupError& e) {
    // Name the frontier vertex responsible; the batch is re-scanned serially.
    for (VertexId v : front) {
      try {
        (void)predictor.predict_one(g.position(v));
      } catch (const LookupError& inner) {
        throw LookupError("frontier vertex " + std::to_string(v) + ": " + inner.what());
      }
    }
    throw;
  }

  GraphBuilder b(g);
  SpatialIndex index(g.vertices(), std::max(params.d_merge, 1.0));
  const double cos_limit = std::cos(params.back_edge_angle_deg * kPi / 180.0);

  for (std::size_t k = 0; k < front.size(); ++k) {
    const VertexId v = front[k];
    const Vec2 pv = b.position(v);
    const AdjacencyPrediction& pred = preds[k];
    for (std::size_t slot : valid_slots(pred, params.t_valid)) {
      if (params.max_inserted_degree && b.degree(v) >= *params.max_inserted_degree) break;
      const Vec2 p = pv + pred.entries[slot].offset;
      const Vec2 dir = p - pv;

      bool back = false;
      for (VertexId u : b.neighbors(v)) {
        if (norm(dir) > 0.0 && cos_angle(dir, b.position(u) - pv) > cos_limit) {
          back = true;
          break;
        }
      }
      if (back) continue;

      if (const auto hit = index.nearest_within(p, params.d_merge)) {
        if (hit->index == v) continue;
        if (b.add_edge(v, hit->index)) ++stats.merges;
      } else if (pred.entries[slot].p_road >= params.t_valid_expand) {
        const VertexId nv = b.add_vertex(p);
        index.insert(p);
        b.add_edge(v, nv);
        ++stats.insertions;
      }
    }
  }
  return {b.build(), stats};
}

std::pair<PlanarGraph, ExpandStats> expand(const PlanarGraph& g, const Predictor& predictor,
                                           const ExpandParams& params, std::size_t threads) {
  params.validate();
  ExpandStats stats;
  PlanarGraph current = g;
  for (int it = 0; it < params.iterations; ++it) {
    auto [next, s] = expand_once(current, predictor, params, threads);
    stats.iterations.push_back(s);
    current = std::move(next);
    if (!s.changed()) break;
  }
  return {std::move(current), stats};
}

}  // namespace roadnet
