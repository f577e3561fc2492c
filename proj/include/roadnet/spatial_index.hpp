#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "roadnet/geometry.hpp"

namespace roadnet {

/// Uniform-grid bucket index over 2D points. Supports appends, so graph
/// growth can keep it current; queries are exact (identical to a linear scan).
class SpatialIndex {
 public:
  struct Hit {
    std::size_t index = 0;
    double distance = 0.0;
  };

  explicit SpatialIndex(double cell_size = 16.0);
  explicit SpatialIndex(std::span<const Vec2> points, double cell_size = 16.0);

  std::size_t insert(Vec2 p);
  std::size_t size() const noexcept { return points_.size(); }
  Vec2 point(std::size_t i) const { return points_.at(i); }

  /// Closest point with distance <= radius; ties go to the lowest index.
  /// `exclude`, when set, is never returned.
  std::optional<Hit> nearest_within(Vec2 p, double radius,
                                    std::optional<std::size_t> exclude = {}) const;

  /// Indices with distance <= radius, ascending.
  std::vector<std::size_t> within(Vec2 p, double radius) const;

 private:
  struct CellRange {
    std::int64_t x0, y0, x1, y1;
  };
  std::int64_t cell_of(double v) const;
  static std::uint64_t key(std::int64_t cx, std::int64_t cy);
  std::optional<CellRange> cells_for(Vec2 p, double radius) const;

  double cell_size_;
  std::vector<Vec2> points_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
  std::int64_t min_cx_ = 0, min_cy_ = 0, max_cx_ = -1, max_cy_ = -1;
};

/// Free-function form used throughout the pipeline.
std::optional<SpatialIndex::Hit> nearest_within(const SpatialIndex& index, Vec2 p, double radius);

/// Grid index over line segments for point-to-segment proximity queries.
class SegmentIndex {
 public:
  struct Hit {
    std::size_t segment = 0;
    double distance = 0.0;
    double t = 0.0;  ///< parameter along the segment, 0 at `a`
    Vec2 point;
  };

  explicit SegmentIndex(double cell_size = 32.0);

  std::size_t insert(Vec2 a, Vec2 b);
  std::size_t size() const noexcept { return segments_.size(); }

  /// Closest segment point within radius; ties go to the lowest segment index.
  std::optional<Hit> nearest_within(Vec2 p, double radius) const;

 private:
  std::int64_t cell_of(double v) const;
  static std::uint64_t key(std::int64_t cx, std::int64_t cy);

  double cell_size_;
  std::vector<std::pair<Vec2, Vec2>> segments_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace roadnet
