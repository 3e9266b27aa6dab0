//
// Small fixed-size vector math used throughout the engine.
//

#ifndef BSURF_MATH_HPP
#define BSURF_MATH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

namespace bsurf {

inline constexpr double pi = 3.14159265358979323846;

struct vec2 {
  double x = 0;
  double y = 0;
};

struct vec3 {
  double x = 0;
  double y = 0;
  double z = 0;
};

struct vec3i {
  int x = 0;
  int y = 0;
  int z = 0;

  int&       operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const int& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline bool operator==(const vec3i& a, const vec3i& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}

// -----------------------------------------------------------------------------
// VEC2
// -----------------------------------------------------------------------------

inline vec2 operator+(vec2 a, vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline vec2 operator-(vec2 a, vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline vec2 operator-(vec2 a) { return {-a.x, -a.y}; }
inline vec2 operator*(vec2 a, double s) { return {a.x * s, a.y * s}; }
inline vec2 operator*(double s, vec2 a) { return {a.x * s, a.y * s}; }
inline vec2 operator/(vec2 a, double s) { return {a.x / s, a.y / s}; }
inline vec2& operator+=(vec2& a, vec2 b) { return a = a + b; }
inline vec2& operator-=(vec2& a, vec2 b) { return a = a - b; }
inline bool  operator==(vec2 a, vec2 b) { return a.x == b.x && a.y == b.y; }
inline bool  operator!=(vec2 a, vec2 b) { return !(a == b); }

inline double dot(vec2 a, vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(vec2 a, vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(vec2 a) { return std::sqrt(dot(a, a)); }
inline double length_squared(vec2 a) { return dot(a, a); }
inline vec2   normalize(vec2 a) {
  auto l = length(a);
  return l > 0 ? a / l : a;
}
inline double distance(vec2 a, vec2 b) { return length(a - b); }
inline vec2   lerp(vec2 a, vec2 b, double t) { return a * (1 - t) + b * t; }
// Counter-clockwise perpendicular.
inline vec2 perp(vec2 a) { return {-a.y, a.x}; }
inline vec2 rotate(vec2 a, double angle) {
  auto c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}
inline double angle_of(vec2 a) { return std::atan2(a.y, a.x); }

// Unsigned angle between two vectors in [0, pi]; zero vectors give 0.
inline double angle_between(vec2 a, vec2 b) {
  if (length_squared(a) == 0 || length_squared(b) == 0) return 0;
  return std::abs(std::atan2(cross(a, b), dot(a, b)));
}

// -----------------------------------------------------------------------------
// VEC3
// -----------------------------------------------------------------------------

inline vec3 operator+(vec3 a, vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline vec3 operator-(vec3 a, vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline vec3 operator-(vec3 a) { return {-a.x, -a.y, -a.z}; }
inline vec3 operator*(vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline vec3 operator*(double s, vec3 a) { return {a.x * s, a.y * s, a.z * s}; }
inline vec3 operator/(vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline vec3& operator+=(vec3& a, vec3 b) { return a = a + b; }
inline vec3& operator-=(vec3& a, vec3 b) { return a = a - b; }
inline bool  operator==(vec3 a, vec3 b) {
  return a.x == b.x && a.y == b.y && a.z == b.z;
}
inline bool operator!=(vec3 a, vec3 b) { return !(a == b); }

inline double dot(vec3 a, vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline vec3   cross(vec3 a, vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(vec3 a) { return std::sqrt(dot(a, a)); }
inline double length_squared(vec3 a) { return dot(a, a); }
inline vec3   normalize(vec3 a) {
  auto l = length(a);
  return l > 0 ? a / l : a;
}
inline double distance(vec3 a, vec3 b) { return length(a - b); }
inline vec3   lerp(vec3 a, vec3 b, double t) { return a * (1 - t) + b * t; }
inline vec3   min(vec3 a, vec3 b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline vec3 max(vec3 a, vec3 b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

// Distance of p from the segment [a, b].
inline double point_segment_distance(vec3 p, vec3 a, vec3 b) {
  auto ab = b - a;
  auto l2 = dot(ab, ab);
  if (l2 == 0) return distance(p, a);
  auto t = std::clamp(dot(p - a, ab) / l2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

// Interior angle at a of triangle (a, b, c).
inline double corner_angle(vec3 a, vec3 b, vec3 c) {
  auto u = b - a, v = c - a;
  return std::atan2(length(cross(u, v)), dot(u, v));
}

inline double triangle_area(vec3 a, vec3 b, vec3 c) {
  return length(cross(b - a, c - a)) / 2;
}

inline double rad2deg(double a) { return a * 180 / pi; }
inline double deg2rad(double a) { return a * pi / 180; }

}  // namespace bsurf

#endif
