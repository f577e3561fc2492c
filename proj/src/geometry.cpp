#include "roadnet/geometry.hpp"

#include <algorithm>

namespace roadnet {

double cos_angle(Vec2 a, Vec2 b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

Vec2 project_onto_segment(Vec2 p, Vec2 a, Vec2 b, double* t) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double s = 0.0;
  if (len2 > 0.0) s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  if (t) *t = s;
  if (s == 0.0) return a;
  if (s == 1.0) return b;
  return a + s * ab;
}

}  // namespace roadnet
