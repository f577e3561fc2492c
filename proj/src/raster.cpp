#include "roadnet/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "roadnet/error.hpp"

namespace roadnet {

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("mask dimensions must be positive, got " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

int round_pixel(double v) { return static_cast<int>(std::lround(v)); }

std::vector<std::pair<int, int>> line_pixels(int x0, int y0, int x1, int y1) {
  if (std::pair(x1, y1) < std::pair(x0, y0)) {
    std::swap(x0, x1);
    std::swap(y0, y1);
  }
  const int dx = std::abs(x1 - x0);
  const int dy = std::abs(y1 - y0);
  const int sx = x1 >= x0 ? 1 : -1;
  const int sy = y1 >= y0 ? 1 : -1;

  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(std::max(dx, dy)) + 1);
  int x = x0, y = y0;
  if (dx >= dy) {
    int err = 2 * dy - dx;
    for (int i = 0; i <= dx; ++i) {
      out.emplace_back(x, y);
      if (err > 0) {
        y += sy;
        err -= 2 * dx;
      }
      err += 2 * dy;
      x += sx;
    }
  } else {
    int err = 2 * dx - dy;
    for (int i = 0; i <= dy; ++i) {
      out.emplace_back(x, y);
      if (err > 0) {
        x += sx;
        err -= 2 * dy;
      }
      err += 2 * dx;
      y += sy;
    }
  }
  return out;
}

std::vector<std::pair<int, int>> line_pixels(Vec2 a, Vec2 b) {
  if (b < a) std::swap(a, b);
  const double dx = b.x - a.x;  // >= 0 after the swap
  const double dy = b.y - a.y;
  std::vector<std::pair<int, int>> out;
  if (dx == 0.0 && dy == 0.0) {
    out.emplace_back(round_pixel(a.x), round_pixel(a.y));
    return out;
  }
  // Exact half-pixel ties stay on the side of the start point, as in the
  // integer walk above.
  if (std::abs(dx) >= std::abs(dy)) {
    const int xs = round_pixel(a.x), xe = round_pixel(b.x);
    for (int x = xs; x <= xe; ++x) {
      const double y = a.y + (x - a.x) * dy / dx;
      out.emplace_back(x, static_cast<int>(dy >= 0.0 ? std::ceil(y - 0.5) : std::floor(y + 0.5)));
    }
  } else {
    const int ys = round_pixel(a.y), ye = round_pixel(b.y);
    const int step = ye >= ys ? 1 : -1;
    for (int y = ys;; y += step) {
      const double x = a.x + (y - a.y) * dx / dy;
      out.emplace_back(static_cast<int>(std::ceil(x - 0.5)), y);
      if (y == ye) break;
    }
  }
  return out;
}

void draw_thick_line(BinaryMask& mask, Vec2 a, Vec2 b, int width_px) {
  if (width_px < 1 || width_px % 2 == 0) {
    throw ValidationError("line width must be a positive odd number, got " + std::to_string(width_px));
  }
  const int half = (width_px - 1) / 2;
  const bool x_major = std::abs(b.x - a.x) >= std::abs(b.y - a.y);
  for (const auto& [x, y] : line_pixels(a, b)) {
    for (int k = -half; k <= half; ++k) {
      if (x_major)
        mask.set(x, y + k);
      else
        mask.set(x + k, y);
    }
  }
}

void draw_thick_line(BinaryMask& mask, int x0, int y0, int x1, int y1, int width_px) {
  draw_thick_line(mask, Vec2{static_cast<double>(x0), static_cast<double>(y0)},
                  Vec2{static_cast<double>(x1), static_cast<double>(y1)}, width_px);
}

BinaryMask rasterize_graph(const PlanarGraph& g, int width_px, Canvas canvas) {
  if (width_px < 1 || width_px % 2 == 0) {
    throw ValidationError("raster width must be a positive odd number, got " + std::to_string(width_px));
  }
  BinaryMask mask(canvas.width, canvas.height);
  for (const Edge& e : g.edges()) draw_thick_line(mask, g.position(e.a), g.position(e.b), width_px);
  return mask;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.canvas() != b.canvas()) {
    throw ValidationError("IoU canvas mismatch: " + std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                          " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
  std::size_t inter = 0, uni = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      const bool pa = a.get(x, y), pb = b.get(x, y);
      inter += (pa && pb) ? 1 : 0;
      uni += (pa || pb) ? 1 : 0;
    }
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace roadnet
