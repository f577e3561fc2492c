#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "roadnet/graph.hpp"

namespace roadnet {

struct Canvas {
  int width = 0;
  int height = 0;
  friend bool operator==(const Canvas&, const Canvas&) = default;
};

/// Row-major bit grid.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Canvas canvas() const noexcept { return {width_, height_}; }

  bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool get(int x, int y) const { return bits_[index(x, y)] != 0; }
  /// Out-of-canvas writes are ignored.
  void set(int x, int y) {
    if (contains(x, y)) bits_[index(x, y)] = 1;
  }
  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Integer midpoint (Bresenham) line between pixel centers, endpoints
/// included. The walk always starts from the lexicographically smaller
/// endpoint so both orientations produce the same pixels; exact half-pixel
/// ties round toward that start.
std::vector<std::pair<int, int>> line_pixels(int x0, int y0, int x1, int y1);

/// The same walk for real endpoints: for every pixel along the major axis
/// between the rounded endpoints, the minor coordinate is the exact line's
/// value rounded to the nearest pixel (ties toward the start). Equals the
/// integer walk when both endpoints are integral; a polyline through points of
/// a line reproduces that line's pixels.
std::vector<std::pair<int, int>> line_pixels(Vec2 a, Vec2 b);

/// Draws a line of odd `width_px`: each line pixel is extended by
/// (width_px - 1) / 2 pixels on both sides across the line's major axis
/// (vertically for x-major lines, horizontally for y-major lines).
void draw_thick_line(BinaryMask& mask, Vec2 a, Vec2 b, int width_px);
void draw_thick_line(BinaryMask& mask, int x0, int y0, int x1, int y1, int width_px);

/// Rasterizes every edge from its exact endpoints. Throws ValidationError for
/// an even or non-positive width or an empty canvas.
BinaryMask rasterize_graph(const PlanarGraph& g, int width_px, Canvas canvas);

/// |a AND b| / |a OR b|; 1 when both are empty. Throws ValidationError when
/// the dimensions differ.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

/// Nearest integer, halves away from zero.
int round_pixel(double v);

}  // namespace roadnet
