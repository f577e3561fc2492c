#include "roadnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "roadnet/error.hpp"
#include "roadnet/parallel.hpp"
#include "roadnet/random.hpp"
#include "roadnet/spatial_index.hpp"

namespace roadnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Shortest path lengths from `src`; nodes beyond `limit` (up to rounding)
/// stay at infinity.
std::vector<double> shortest_paths(const PlanarGraph& g, VertexId src, double limit = kInf) {
  if (limit < kInf) limit += 1e-9 * std::max(1.0, limit);
  std::vector<double> dist(g.vertex_count(), kInf);
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[src] = 0.0;
  queue.emplace(0.0, src);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (VertexId v : g.neighbors(u)) {
      const double nd = d + distance(g.position(u), g.position(v));
      if (nd <= limit && nd < dist[v]) {
        dist[v] = nd;
        queue.emplace(nd, v);
      }
    }
  }
  return dist;
}

std::vector<VertexId> reached(const std::vector<double>& dist) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < dist.size(); ++v)
    if (dist[v] < kInf) out.push_back(v);
  return out;
}

std::size_t greedy_match(const PlanarGraph& gd, const std::vector<VertexId>& holes, const PlanarGraph& pd,
                         const std::vector<VertexId>& marbles, double radius) {
  std::vector<Vec2> mpos;
  mpos.reserve(marbles.size());
  for (VertexId m : marbles) mpos.push_back(pd.position(m));
  const SpatialIndex index(mpos, std::max(radius, 1.0));
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t h = 0; h < holes.size(); ++h) {
    const Vec2 p = gd.position(holes[h]);
    for (std::size_t m : index.within(p, radius)) pairs.emplace_back(distance(p, mpos[m]), h, m);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<char> hole_used(holes.size(), 0), marble_used(marbles.size(), 0);
  std::size_t matched = 0;
  for (const auto& [d, h, m] : pairs) {
    if (hole_used[h] || marble_used[m]) continue;
    hole_used[h] = marble_used[m] = 1;
    ++matched;
  }
  return matched;
}

Vec2 point_along(const std::vector<Vec2>& poly, const std::vector<double>& cum, double s) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  std::size_t k = it == cum.begin() ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
  if (k + 1 >= poly.size()) return poly.back();
  const double len = cum[k + 1] - cum[k];
  const double t = len > 0.0 ? (s - cum[k]) / len : 0.0;
  return poly[k] + (poly[k + 1] - poly[k]) * t;
}

}  // namespace

namespace {

constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

/// Maximal chains of degree-2 vertices, each listed from one end to the other.
/// Chains between degree != 2 vertices come first (by start vertex, then
/// neighbor order); closed loops of degree-2 vertices follow, each starting
/// and ending at its lowest-index vertex.
std::vector<std::vector<VertexId>> decompose_chains(const PlanarGraph& g) {
  std::vector<char> is_node(g.vertex_count(), 0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) is_node[v] = g.degree(v) != 2;
  std::vector<char> used(g.edge_count(), 0);
  auto edge_id = [&](VertexId a, VertexId b) {
    const Edge e = Edge::canonical(a, b);
    return static_cast<std::size_t>(std::lower_bound(g.edges().begin(), g.edges().end(), e) - g.edges().begin());
  };
  auto walk = [&](VertexId start, VertexId next) {
    std::vector<VertexId> chain{start};
    VertexId prev = start, cur = next;
    used[edge_id(start, next)] = 1;
    while (!is_node[cur]) {
      chain.push_back(cur);
      const auto nb = g.neighbors(cur);
      const VertexId nxt = nb[0] == prev ? nb[1] : nb[0];
      const std::size_t e = edge_id(cur, nxt);
      if (used[e]) break;
      used[e] = 1;
      prev = cur;
      cur = nxt;
    }
    chain.push_back(cur);
    return chain;
  };

  std::vector<std::vector<VertexId>> out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!is_node[v]) continue;
    for (VertexId u : g.neighbors(v))
      if (!used[edge_id(v, u)]) out.push_back(walk(v, u));
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (is_node[v] || used[edge_id(v, g.neighbors(v)[0])]) continue;
    is_node[v] = 1;
    out.push_back(walk(v, g.neighbors(v)[0]));
  }
  return out;
}

struct ChainGeometry {
  std::vector<Vec2> poly;
  std::vector<double> cum;
  std::size_t pieces = 1;
};

ChainGeometry chain_geometry(const PlanarGraph& g, const std::vector<VertexId>& chain, double interval) {
  ChainGeometry c;
  c.cum.push_back(0.0);
  for (VertexId v : chain) c.poly.push_back(g.position(v));
  for (std::size_t k = 1; k < c.poly.size(); ++k) c.cum.push_back(c.cum.back() + distance(c.poly[k - 1], c.poly[k]));
  c.pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c.cum.back() / interval - 1e-9)));
  if (chain.front() == chain.back()) c.pieces = std::max<std::size_t>(c.pieces, 3);
  return c;
}

/// `g` with evenly spaced control points inserted along every chain (the
/// points resample_chains would produce) while keeping every original vertex
/// and the exact geometry. `controls` receives the control vertex ids: the
/// degree != 2 vertices, loop anchors and inserted points.
PlanarGraph insert_controls(const PlanarGraph& g, double interval, std::vector<VertexId>& controls) {
  GraphBuilder out;
  for (const Vec2& p : g.vertices()) out.add_vertex(p);
  std::vector<char> is_control(g.vertex_count(), 0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) is_control[v] = g.degree(v) != 2;

  for (const auto& chain : decompose_chains(g)) {
    is_control[chain.front()] = 1;
    const ChainGeometry c = chain_geometry(g, chain, interval);
    std::size_t next_sample = 1;
    VertexId prev = chain.front();
    for (std::size_t k = 1; k < chain.size(); ++k) {
      // Samples strictly inside segment k-1, in arc order.
      while (next_sample < c.pieces) {
        const double s = c.cum.back() * static_cast<double>(next_sample) / static_cast<double>(c.pieces);
        if (s >= c.cum[k]) break;
        const double len = c.cum[k] - c.cum[k - 1];
        const double t = len > 0.0 ? (s - c.cum[k - 1]) / len : 0.0;
        ++next_sample;
        if (t <= 0.0) {
          is_control[prev] = 1;
          continue;
        }
        const VertexId cur = out.add_vertex(c.poly[k - 1] + (c.poly[k] - c.poly[k - 1]) * t);
        is_control.push_back(1);
        out.add_edge(prev, cur);
        prev = cur;
      }
      out.add_edge(prev, chain[k]);
      prev = chain[k];
    }
  }
  controls.clear();
  for (VertexId v = 0; v < is_control.size(); ++v)
    if (is_control[v]) controls.push_back(v);
  return out.build();
}

}  // namespace

PlanarGraph resample_chains(const PlanarGraph& g, double interval) {
  if (!(interval > 0.0)) throw ValidationError("resample interval must be positive");
  GraphBuilder out;
  std::vector<std::size_t> node(g.vertex_count(), kNoNode);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) != 2) node[v] = out.add_vertex(g.position(v));

  for (const auto& chain : decompose_chains(g)) {
    if (node[chain.front()] == kNoNode) node[chain.front()] = out.add_vertex(g.position(chain.front()));
    const ChainGeometry c = chain_geometry(g, chain, interval);
    VertexId prev = node[chain.front()];
    for (std::size_t k = 1; k < c.pieces; ++k) {
      const double s = c.cum.back() * static_cast<double>(k) / static_cast<double>(c.pieces);
      const VertexId cur = out.add_vertex(point_along(c.poly, c.cum, s));
      out.add_edge(prev, cur);
      prev = cur;
    }
    out.add_edge(prev, node[chain.back()]);
  }
  return out.build();
}

void TopoParams::validate() const {
  if (!(hole_interval > 0.0) || !(match_radius > 0.0) || !(propagation_radius > 0.0) || num_seeds == 0)
    throw ValidationError("topo parameters must be positive");
}

void AplsParams::validate() const {
  if (!(snap_radius > 0.0) || !(control_interval > 0.0)) throw ValidationError("apls parameters must be positive");
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

TopoResult topo(const PlanarGraph& pred, const PlanarGraph& gt, const TopoParams& params, std::size_t threads) {
  params.validate();
  TopoResult r;
  if (gt.empty()) {
    r.precision = pred.empty() ? 1.0 : 0.0;
    r.recall = 1.0;
    r.f1 = f1_score(r.precision, r.recall);
    return r;
  }
  const PlanarGraph gd = resample_chains(gt, params.hole_interval);
  const PlanarGraph pd = resample_chains(pred, params.hole_interval);
  const SpatialIndex pindex(pd.vertices(), std::max(params.match_radius, 1.0));

  Rng rng(derive_seed(params.seed, {0x70706f}));
  std::vector<VertexId> seeds(params.num_seeds);
  for (auto& s : seeds) s = static_cast<VertexId>(rng.index(gd.vertex_count()));

  struct Tally {
    std::size_t holes = 0, marbles = 0, matched = 0;
  };
  std::vector<Tally> tallies(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    const VertexId s = seeds[i];
    const auto holes = reached(shortest_paths(gd, s, params.propagation_radius));
    Tally& t = tallies[i];
    t.holes = holes.size();
    const auto hit = pindex.nearest_within(gd.position(s), params.match_radius);
    if (!hit) return;
    const auto marbles = reached(shortest_paths(pd, hit->index, params.propagation_radius));
    t.marbles = marbles.size();
    t.matched = greedy_match(gd, holes, pd, marbles, params.match_radius);
  });
  for (const auto& t : tallies) {
    r.holes += t.holes;
    r.marbles += t.marbles;
    r.matched_holes += t.matched;
  }
  r.matched_marbles = r.matched_holes;
  r.recall = static_cast<double>(r.matched_holes) / static_cast<double>(r.holes);
  r.precision = r.marbles > 0 ? static_cast<double>(r.matched_marbles) / static_cast<double>(r.marbles) : 0.0;
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

double apls_directional(const PlanarGraph& src, const PlanarGraph& dst, const AplsParams& params,
                        std::size_t threads) {
  params.validate();
  if (src.edge_count() == 0) return 1.0;
  std::vector<VertexId> controls;
  const PlanarGraph s = insert_controls(src, params.control_interval, controls);
  const PlanarGraph& t = dst;

  // Snap every control point of s onto t, splitting t's edges where needed.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  const SpatialIndex vindex(t.vertices(), std::max(params.snap_radius, 1.0));
  SegmentIndex sindex(std::max(params.snap_radius * 2.0, 8.0));
  for (const Edge& e : t.edges()) sindex.insert(t.position(e.a), t.position(e.b));

  std::vector<std::size_t> snapped(controls.size(), kNone);
  struct Split {
    double t;
    std::size_t node;
  };
  std::vector<std::vector<Split>> splits(t.edge_count());
  std::vector<Vec2> extra;
  for (std::size_t v = 0; v < controls.size(); ++v) {
    const Vec2 p = s.position(controls[v]);
    const auto vh = vindex.nearest_within(p, params.snap_radius);
    const auto sh = sindex.nearest_within(p, params.snap_radius);
    if (vh && (!sh || vh->distance <= sh->distance + 1e-9)) {
      snapped[v] = vh->index;
    } else if (sh) {
      const Edge& e = t.edges()[sh->segment];
      if (sh->t <= 0.0) {
        snapped[v] = e.a;
      } else if (sh->t >= 1.0) {
        snapped[v] = e.b;
      } else {
        snapped[v] = t.vertex_count() + extra.size();
        extra.push_back(sh->point);
        splits[sh->segment].push_back({sh->t, snapped[v]});
      }
    }
  }

  GraphBuilder b;
  for (const Vec2& p : t.vertices()) b.add_vertex(p);
  for (const Vec2& p : extra) b.add_vertex(p);
  for (std::size_t k = 0; k < t.edge_count(); ++k) {
    const Edge& e = t.edges()[k];
    auto& sp = splits[k];
    std::sort(sp.begin(), sp.end(), [](const Split& x, const Split& y) {
      return std::tie(x.t, x.node) < std::tie(y.t, y.node);
    });
    VertexId prev = e.a;
    for (const Split& x : sp) {
      b.add_edge(prev, x.node);
      prev = x.node;
    }
    b.add_edge(prev, e.b);
  }
  const PlanarGraph ts = b.build();

  struct Partial {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::vector<Partial> partial(controls.size());
  parallel_for(controls.size(), threads, [&](std::size_t i) {
    const auto ls = shortest_paths(s, controls[i]);
    std::vector<double> lt;
    if (snapped[i] != kNone) lt = shortest_paths(ts, snapped[i]);
    Partial& out = partial[i];
    for (std::size_t j = i + 1; j < controls.size(); ++j) {
      const double l = ls[controls[j]];
      if (l == kInf) continue;
      double term = 1.0;
      if (snapped[i] != kNone && snapped[j] != kNone && lt[snapped[j]] < kInf) {
        const double l2 = lt[snapped[j]];
        // Both lengths are sums over differently split edges; ignore rounding-level gaps.
        const double gap = std::abs(l - l2) <= 1e-9 * std::max(1.0, l) ? 0.0 : std::abs(l - l2);
        term = l > 0.0 ? std::min(1.0, gap / l) : (l2 == 0.0 ? 0.0 : 1.0);
      }
      out.sum += term;
      ++out.count;
    }
  });
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : partial) {
    sum += p.sum;
    count += p.count;
  }
  return count > 0 ? 1.0 - sum / static_cast<double>(count) : 1.0;
}

double apls(const PlanarGraph& pred, const PlanarGraph& gt, const AplsParams& params, std::size_t threads) {
  params.validate();
  const bool pe = pred.edge_count() == 0, ge = gt.edge_count() == 0;
  if (pe && ge) return 1.0;
  if (pe != ge) return 0.0;
  const double a = apls_directional(gt, pred, params, threads);
  const double b = apls_directional(pred, gt, params, threads);
  return f1_score(a, b);
}

double graph_iou(const PlanarGraph& pred, const PlanarGraph& gt, Canvas canvas, int width_px) {
  return mask_iou(rasterize_graph(pred, width_px, canvas), rasterize_graph(gt, width_px, canvas));
}

std::string MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["topo_precision"] = topo_precision;
  j["topo_recall"] = topo_recall;
  j["topo_f1"] = topo_f1;
  j["apls"] = apls;
  j["iou"] = iou;
  j["params"] = {
      {"topo",
       {{"hole_interval", params.topo.hole_interval},
        {"match_radius", params.topo.match_radius},
        {"propagation_radius", params.topo.propagation_radius},
        {"num_seeds", params.topo.num_seeds},
        {"seed", params.topo.seed}}},
      {"apls", {{"snap_radius", params.apls.snap_radius}, {"control_interval", params.apls.control_interval}}},
      {"iou_width", params.iou_width},
      {"canvas", {canvas.width, canvas.height}},
  };
  return j.dump(2) + "\n";
}

MetricReport evaluate(const PlanarGraph& pred, const PlanarGraph& gt, Canvas canvas, const MetricParams& params,
                      std::size_t threads) {
  MetricReport r;
  r.params = params;
  r.canvas = canvas;
  const TopoResult t = topo(pred, gt, params.topo, threads);
  r.topo_precision = t.precision;
  r.topo_recall = t.recall;
  r.topo_f1 = t.f1;
  r.apls = apls(pred, gt, params.apls, threads);
  r.iou = graph_iou(pred, gt, canvas, params.iou_width);
  return r;
}

}  // namespace roadnet
