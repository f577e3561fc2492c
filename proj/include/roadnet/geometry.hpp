#pragma once

#include <cmath>
#include <compare>

namespace roadnet {

/// Pixel-space 2D vector. x grows right (columns), y grows down (rows);
/// integer coordinates are pixel centers.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
  // Lexicographic (x, then y).
  friend constexpr auto operator<=>(Vec2 a, Vec2 b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
  }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::sqrt(v.x * v.x + v.y * v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Cosine of the angle between a and b; a zero-length vector yields 1.
double cos_angle(Vec2 a, Vec2 b);

/// Closest point to p on segment [a, b]; `t` receives the segment parameter.
Vec2 project_onto_segment(Vec2 p, Vec2 a, Vec2 b, double* t = nullptr);

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace roadnet
