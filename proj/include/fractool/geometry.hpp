#ifndef FRACTOOL_GEOMETRY_HPP
#define FRACTOOL_GEOMETRY_HPP

#include <cmath>
#include <numbers>

namespace fractool {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Maps an angle in radians onto (-pi, pi].
inline double canonical_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

inline double degrees_to_radians(double deg) { return deg * (std::numbers::pi / 180.0); }
inline double radians_to_degrees(double rad) { return rad * (180.0 / std::numbers::pi); }

}  // namespace fractool

#endif  // FRACTOOL_GEOMETRY_HPP
