#pragma once

#include <cstdint>
#include <vector>

#include "roadnet/graph.hpp"
#include "roadnet/raster.hpp"
#include "roadnet/score_maps.hpp"

namespace roadnet {

struct SceneConfig {
  int width = 512;
  int height = 512;
  double grid_pitch = 64.0;
  double jitter = 0.0;          ///< max per-axis vertex displacement, px
  double edge_drop_prob = 0.0;
  double diagonal_prob = 0.0;   ///< chance of one diagonal per grid cell
  double sampling_interval = 20.0;
  double point_render_radius = 2.0;
  int road_width = 3;
  double blur_sigma = 1.0;      ///< 0 keeps the binary renders
  std::uint64_t seed = 0;

  Canvas canvas() const { return {width, height}; }
  void validate() const;
};

/// Jittered grid with random edge removal and occasional cell diagonals.
/// Grid nodes sit at pitch/2 + i * pitch; isolated vertices are pruned.
PlanarGraph gen_scene(const SceneConfig& cfg);

/// Points every `interval` (or closer) along each edge, vertices included.
std::vector<Vec2> sampling_points(const PlanarGraph& g, double interval);

/// Keypoint disks at degree != 2 vertices, sampling disks at
/// sampling_points, road raster of road_width; then the optional blur.
ScoreMaps render_maps(const PlanarGraph& g, const SceneConfig& cfg);

/// Separable Gaussian blur with zero padding, clamped to [0, 1].
Grid gaussian_blur(const Grid& grid, double sigma);

/// Adds clipped Gaussian noise to every pixel of every channel.
ScoreMaps corrupt_maps(const ScoreMaps& maps, double noise_sigma, std::uint64_t seed);

}  // namespace roadnet
