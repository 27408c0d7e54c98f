#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace scenepath {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr Vec2 operator/(double k) const { return {x / k, y / k}; }
  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
  }
  constexpr Vec2 perp() const { return {-y, x}; }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

using Polygon = std::vector<Vec2>;

struct Box {
  Vec2 lo;
  Vec2 hi;
  bool contains(Vec2 p, double pad = 0.0) const {
    return p.x >= lo.x - pad && p.x <= hi.x + pad && p.y >= lo.y - pad && p.y <= hi.y + pad;
  }
  bool overlaps(const Box& o, double pad = 0.0) const {
    return lo.x - pad <= o.hi.x && o.lo.x - pad <= hi.x && lo.y - pad <= o.hi.y && o.lo.y - pad <= hi.y;
  }
};

Box bounding_box(std::span<const Vec2> pts);

/// Axis-aligned rectangle as a counter-clockwise polygon.
Polygon make_rect(Vec2 lo, Vec2 hi);

// Even-odd rule; points on the boundary count as inside.
bool point_in_polygon(std::span<const Vec2> poly, Vec2 p);

double distance_point_segment(Vec2 p, Vec2 a, Vec2 b);
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
double distance_segment_segment(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Distance from p to the polygon region (zero inside).
double distance_to_polygon(std::span<const Vec2> poly, Vec2 p);

/// Distance from segment ab to the polygon region (zero when touching or inside).
double distance_segment_polygon(std::span<const Vec2> poly, Vec2 a, Vec2 b);

/// True when the polygon has at least three vertices and no two non-adjacent edges meet.
bool polygon_is_simple(std::span<const Vec2> poly);

/// Signed turning angle at b for the polyline a-b-c, in (-pi, pi].
double turning_angle(Vec2 a, Vec2 b, Vec2 c);

/// Curvature of the circle through three points; zero when collinear or degenerate.
double menger_curvature(Vec2 a, Vec2 b, Vec2 c);

/// Distance along the ray origin + t*dir (dir unit) to the first polygon edge, or +inf.
double ray_cast_polygon(std::span<const Vec2> poly, Vec2 origin, Vec2 dir);

}  // namespace scenepath
