#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sketchopt {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }
inline Vec2 normalized(Vec2 v) { return v / norm(v); }

/// Flip a direction so its leading nonzero component is positive.
constexpr Vec2 canonical_direction(Vec2 d) {
  if (d.x < 0.0 || (d.x == 0.0 && d.y < 0.0)) return {-d.x, -d.y};
  return d;
}

/// Undirected angle of a vector, in [0, pi).
inline double line_angle(Vec2 d) {
  double a = std::atan2(d.y, d.x);
  if (a < 0.0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

/// Smallest difference between two undirected angles, in [0, pi/2].
inline double angle_between_lines(double a, double b) {
  double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return std::min(d, std::numbers::pi - d);
}

/// Distance from p to the closed segment [a, b]; `t` receives the clamped
/// parameter of the closest point.
inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b, double* t = nullptr) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  double s = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  if (t) *t = s;
  return distance(p, a + ab * s);
}

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

}  // namespace sketchopt
