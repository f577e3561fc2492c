#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "roadnet/graph.hpp"
#include "roadnet/raster.hpp"

namespace roadnet {

struct TopoParams {
  double hole_interval = 5.0;
  double match_radius = 8.0;
  double propagation_radius = 150.0;
  std::size_t num_seeds = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AplsParams {
  double snap_radius = 8.0;
  double control_interval = 50.0;

  void validate() const;
};

struct TopoResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Raw sums behind the ratios.
  std::size_t holes = 0;
  std::size_t marbles = 0;
  std::size_t matched_holes = 0;
  std::size_t matched_marbles = 0;
};

/// Resamples every maximal chain of degree-2 vertices at equal arc-length
/// spacing of at most `interval`. Vertices of degree != 2 are kept (in index
/// order, first); a closed loop of degree-2 vertices is anchored at its
/// lowest-index vertex. Two graphs tracing the same curves therefore resample
/// to the same point sets regardless of how their edges were subdivided.
PlanarGraph resample_chains(const PlanarGraph& g, double interval);

/// 0 when p + r == 0.
double f1_score(double precision, double recall);

/// Hole/marble topology score. Both graphs are resampled (resample_chains)
/// every hole_interval;
/// seeds are drawn uniformly from the resampled GT nodes and paired with the
/// nearest resampled prediction node within match_radius. From each pair both
/// graphs are explored up to propagation_radius of path length, and the
/// reached nodes are matched one-to-one, greedily by ascending distance.
TopoResult topo(const PlanarGraph& pred, const PlanarGraph& gt, const TopoParams& params = {},
                std::size_t threads = 1);

/// Score for one direction: control points of `src` (its junctions and
/// endpoints plus evenly spaced points at most control_interval apart along
/// every chain, at the positions resample_chains uses) are snapped onto
/// `dst`, and every connected control pair is compared by shortest-path
/// length. Both path lengths follow the original edges of each graph.
double apls_directional(const PlanarGraph& src, const PlanarGraph& dst, const AplsParams& params = {},
                        std::size_t threads = 1);

/// Harmonic mean of both directions. 0 when exactly one graph has no edges,
/// 1 when neither has any.
double apls(const PlanarGraph& pred, const PlanarGraph& gt, const AplsParams& params = {},
            std::size_t threads = 1);

/// IoU of the two graphs rasterized at `width_px`.
double graph_iou(const PlanarGraph& pred, const PlanarGraph& gt, Canvas canvas, int width_px = 3);

struct MetricParams {
  TopoParams topo;
  AplsParams apls;
  int iou_width = 3;
};

struct MetricReport {
  double topo_precision = 0.0;
  double topo_recall = 0.0;
  double topo_f1 = 0.0;
  double apls = 0.0;
  double iou = 0.0;
  MetricParams params;
  Canvas canvas;

  /// Stable JSON text (fixed key order, shortest round-trip numbers).
  std::string to_json() const;
};

MetricReport evaluate(const PlanarGraph& pred, const PlanarGraph& gt, Canvas canvas,
                      const MetricParams& params = {}, std::size_t threads = 1);

}  // namespace roadnet
