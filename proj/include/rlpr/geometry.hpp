#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rlpr {

using NodeId = std::uint32_t;
using SimTime = double;  // seconds

inline constexpr NodeId kNoNode = 0xffffffffu;

/// Planar vector in meters (positions) or meters/second (velocities).
/// Altitude is a scenario constant and never enters distance computations.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
};

using Position = Vec2;
using Velocity = Vec2;

inline double distance(Position a, Position b) { return (a - b).norm(); }

struct DegenerateGeometry : std::domain_error {
  using std::domain_error::domain_error;
};

/// Angle in degrees at `apex` between the rays apex->a and apex->b, in [0, 180].
inline double angle_between_deg(Position apex, Position a, Position b) {
  const Vec2 u = a - apex;
  const Vec2 v = b - apex;
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) {
    throw DegenerateGeometry("angle undefined for coincident points");
  }
  // atan2 of cross/dot stays accurate near 0 and 180 where acos loses precision.
  const double cross = u.x * v.y - u.y * v.x;
  const double rad = std::atan2(std::abs(cross), u.dot(v));
  return rad * 180.0 / M_PI;
}

}  // namespace rlpr
