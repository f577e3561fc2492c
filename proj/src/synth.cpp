#include "roadnet/synth.hpp"

#include <algorithm>
#include <cmath>

#include "roadnet/error.hpp"
#include "roadnet/random.hpp"

namespace roadnet {

namespace {

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

void stamp_disk(Grid& grid, Vec2 c, double radius) {
  const int x0 = static_cast<int>(std::floor(c.x - radius)), x1 = static_cast<int>(std::ceil(c.x + radius));
  const int y0 = static_cast<int>(std::floor(c.y - radius)), y1 = static_cast<int>(std::ceil(c.y + radius));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      if (!grid.contains(x, y)) continue;
      const double dx = x - c.x, dy = y - c.y;
      if (dx * dx + dy * dy <= radius * radius + 1e-9) grid.at(x, y) = 1.0f;
    }
}

}  // namespace

void SceneConfig::validate() const {
  if (width <= 0 || height <= 0) throw ValidationError("scene canvas must be positive");
  if (!(grid_pitch > 2.0 * jitter) || jitter < 0.0) throw ValidationError("grid pitch must exceed twice the jitter");
  if (!is_prob(edge_drop_prob) || !is_prob(diagonal_prob)) throw ValidationError("scene probabilities must be in [0, 1]");
  if (!(sampling_interval > 0.0) || !(point_render_radius >= 0.0)) throw ValidationError("bad sampling parameters");
  if (road_width < 1 || road_width % 2 == 0) throw ValidationError("road width must be odd and positive");
  if (blur_sigma < 0.0) throw ValidationError("blur sigma must be non-negative");
}

PlanarGraph gen_scene(const SceneConfig& cfg) {
  cfg.validate();
  const int nx = static_cast<int>(std::floor(cfg.width / cfg.grid_pitch));
  const int ny = static_cast<int>(std::floor(cfg.height / cfg.grid_pitch));
  Rng rng(derive_seed(cfg.seed, {0x67656e}));
  GraphBuilder b;
  auto id = [&](int i, int j) { return static_cast<VertexId>(j * nx + i); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double jx = cfg.jitter > 0.0 ? rng.uniform(-cfg.jitter, cfg.jitter) : 0.0;
      const double jy = cfg.jitter > 0.0 ? rng.uniform(-cfg.jitter, cfg.jitter) : 0.0;
      b.add_vertex({cfg.grid_pitch / 2 + i * cfg.grid_pitch + jx, cfg.grid_pitch / 2 + j * cfg.grid_pitch + jy});
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx && !rng.bernoulli(cfg.edge_drop_prob)) b.add_edge(id(i, j), id(i + 1, j));
      if (j + 1 < ny && !rng.bernoulli(cfg.edge_drop_prob)) b.add_edge(id(i, j), id(i, j + 1));
    }
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      if (!rng.bernoulli(cfg.diagonal_prob)) continue;
      if (rng.bernoulli(0.5))
        b.add_edge(id(i, j), id(i + 1, j + 1));
      else
        b.add_edge(id(i + 1, j), id(i, j + 1));
    }
  return remove_isolated(b.build());
}

std::vector<Vec2> sampling_points(const PlanarGraph& g, double interval) {
  const PlanarGraph d = densify(g, interval);
  std::vector<Vec2> out;
  for (VertexId v = 0; v < d.vertex_count(); ++v)
    if (d.degree(v) > 0) out.push_back(d.position(v));
  return out;
}

Grid gaussian_blur(const Grid& grid, double sigma) {
  if (sigma <= 0.0) return grid;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (double& v : k) v /= sum;
  const int w = grid.width, h = grid.height;
  std::vector<double> tmp(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int xx = x + i;
        if (xx >= 0 && xx < w) acc += k[i + r] * grid.at(xx, y);
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  Grid out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) {
        const int yy = y + i;
        if (yy >= 0 && yy < h) acc += k[i + r] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      out.at(x, y) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
    }
  return out;
}

ScoreMaps render_maps(const PlanarGraph& g, const SceneConfig& cfg) {
  cfg.validate();
  ScoreMaps maps(cfg.width, cfg.height);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) != 2) stamp_disk(maps.keypoint, g.position(v), cfg.point_render_radius);
  for (const Vec2& p : sampling_points(g, cfg.sampling_interval))
    stamp_disk(maps.sampling, p, cfg.point_render_radius);
  const BinaryMask road = rasterize_graph(g, cfg.road_width, cfg.canvas());
  for (int y = 0; y < cfg.height; ++y)
    for (int x = 0; x < cfg.width; ++x)
      if (road.get(x, y)) maps.road.at(x, y) = 1.0f;
  maps.keypoint = gaussian_blur(maps.keypoint, cfg.blur_sigma);
  maps.sampling = gaussian_blur(maps.sampling, cfg.blur_sigma);
  maps.road = gaussian_blur(maps.road, cfg.blur_sigma);
  return maps;
}

ScoreMaps corrupt_maps(const ScoreMaps& maps, double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0) throw ValidationError("noise sigma must be non-negative");
  ScoreMaps out = maps;
  if (noise_sigma == 0.0) return out;
  Rng rng(derive_seed(seed, {0x6e6f6973}));
  for (Grid* g : {&out.keypoint, &out.sampling, &out.road})
    for (float& v : g->values)
      v = static_cast<float>(std::clamp(v + noise_sigma * rng.normal(), 0.0, 1.0));
  return out;
}

}  // namespace roadnet
