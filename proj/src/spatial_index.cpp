#include "roadnet/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roadnet/error.hpp"

namespace roadnet {

namespace {

bool better(double d, std::size_t i, double best_d, std::size_t best_i) {
  return d < best_d || (d == best_d && i < best_i);
}

}  // namespace

SpatialIndex::SpatialIndex(double cell_size) : cell_size_(cell_size) {
  if (!(cell_size > 0.0)) throw ValidationError("spatial index cell size must be positive");
}

SpatialIndex::SpatialIndex(std::span<const Vec2> points, double cell_size) : SpatialIndex(cell_size) {
  points_.reserve(points.size());
  for (const Vec2& p : points) insert(p);
}

std::int64_t SpatialIndex::cell_of(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_size_));
}

std::uint64_t SpatialIndex::key(std::int64_t cx, std::int64_t cy) {
  return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xFFFFFFFFULL);
}

std::size_t SpatialIndex::insert(Vec2 p) {
  if (!is_finite(p)) throw ValidationError("cannot index a non-finite point");
  const std::int64_t cx = cell_of(p.x);
  const std::int64_t cy = cell_of(p.y);
  if (points_.empty()) {
    min_cx_ = max_cx_ = cx;
    min_cy_ = max_cy_ = cy;
  } else {
    min_cx_ = std::min(min_cx_, cx);
    max_cx_ = std::max(max_cx_, cx);
    min_cy_ = std::min(min_cy_, cy);
    max_cy_ = std::max(max_cy_, cy);
  }
  points_.push_back(p);
  cells_[key(cx, cy)].push_back(points_.size() - 1);
  return points_.size() - 1;
}

std::optional<SpatialIndex::CellRange> SpatialIndex::cells_for(Vec2 p, double radius) const {
  if (points_.empty() || !(radius >= 0.0) || !is_finite(p)) return std::nullopt;
  // Clamp in floating point first so huge radii cannot overflow the cast.
  auto clamp_cell = [&](double v, std::int64_t lo, std::int64_t hi) {
    const double c = std::floor(v / cell_size_);
    if (c < static_cast<double>(lo)) return lo;
    if (c > static_cast<double>(hi)) return hi;
    return static_cast<std::int64_t>(c);
  };
  CellRange r{clamp_cell(p.x - radius, min_cx_, max_cx_), clamp_cell(p.y - radius, min_cy_, max_cy_),
              clamp_cell(p.x + radius, min_cx_, max_cx_), clamp_cell(p.y + radius, min_cy_, max_cy_)};
  return r;
}

std::optional<SpatialIndex::Hit> SpatialIndex::nearest_within(Vec2 p, double radius,
                                                              std::optional<std::size_t> exclude) const {
  const auto range = cells_for(p, radius);
  if (!range) return std::nullopt;
  std::size_t best_i = std::numeric_limits<std::size_t>::max();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::int64_t cx = range->x0; cx <= range->x1; ++cx) {
    for (std::int64_t cy = range->y0; cy <= range->y1; ++cy) {
      const auto it = cells_.find(key(cx, cy));
      if (it == cells_.end()) continue;
      for (std::size_t i : it->second) {
        if (exclude && i == *exclude) continue;
        const double d = distance(points_[i], p);
        if (d <= radius && better(d, i, best_d, best_i)) {
          best_d = d;
          best_i = i;
        }
      }
    }
  }
  if (best_i == std::numeric_limits<std::size_t>::max()) return std::nullopt;
  return Hit{best_i, best_d};
}

std::vector<std::size_t> SpatialIndex::within(Vec2 p, double radius) const {
  std::vector<std::size_t> out;
  const auto range = cells_for(p, radius);
  if (!range) return out;
  for (std::int64_t cx = range->x0; cx <= range->x1; ++cx) {
    for (std::int64_t cy = range->y0; cy <= range->y1; ++cy) {
      const auto it = cells_.find(key(cx, cy));
      if (it == cells_.end()) continue;
      for (std::size_t i : it->second) {
        if (distance(points_[i], p) <= radius) out.push_back(i);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<SpatialIndex::Hit> nearest_within(const SpatialIndex& index, Vec2 p, double radius) {
  return index.nearest_within(p, radius);
}

SegmentIndex::SegmentIndex(double cell_size) : cell_size_(cell_size) {
  if (!(cell_size > 0.0)) throw ValidationError("segment index cell size must be positive");
}

std::int64_t SegmentIndex::cell_of(double v) const {
  return static_cast<std::int64_t>(std::floor(v / cell_size_));
}

std::uint64_t SegmentIndex::key(std::int64_t cx, std::int64_t cy) {
  return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xFFFFFFFFULL);
}

std::size_t SegmentIndex::insert(Vec2 a, Vec2 b) {
  if (!is_finite(a) || !is_finite(b)) throw ValidationError("cannot index a non-finite segment");
  const std::size_t id = segments_.size();
  segments_.emplace_back(a, b);
  const std::int64_t x0 = cell_of(std::min(a.x, b.x)), x1 = cell_of(std::max(a.x, b.x));
  const std::int64_t y0 = cell_of(std::min(a.y, b.y)), y1 = cell_of(std::max(a.y, b.y));
  for (std::int64_t cx = x0; cx <= x1; ++cx)
    for (std::int64_t cy = y0; cy <= y1; ++cy) cells_[key(cx, cy)].push_back(id);
  return id;
}

std::optional<SegmentIndex::Hit> SegmentIndex::nearest_within(Vec2 p, double radius) const {
  if (segments_.empty() || !(radius >= 0.0)) return std::nullopt;
  const std::int64_t x0 = cell_of(p.x - radius), x1 = cell_of(p.x + radius);
  const std::int64_t y0 = cell_of(p.y - radius), y1 = cell_of(p.y + radius);
  std::optional<Hit> best;
  for (std::int64_t cx = x0; cx <= x1; ++cx) {
    for (std::int64_t cy = y0; cy <= y1; ++cy) {
      const auto it = cells_.find(key(cx, cy));
      if (it == cells_.end()) continue;
      for (std::size_t s : it->second) {
        double t = 0.0;
        const Vec2 q = project_onto_segment(p, segments_[s].first, segments_[s].second, &t);
        const double d = distance(p, q);
        if (d > radius) continue;
        if (!best || better(d, s, best->distance, best->segment)) best = Hit{s, d, t, q};
      }
    }
  }
  return best;
}

}  // namespace roadnet
