#pragma once

#include <cmath>
#include <compare>
#include <numbers>

namespace stealth {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angular comparisons (wedges, cones, arcs) accept this much slack so that
// boundary cells at exactly 45 degrees do not flicker with rounding.
inline constexpr double kAngleEps = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
  friend Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double length(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return length(a - b); }
inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline Point unit_from_angle(double radians) { return {std::cos(radians), std::sin(radians)}; }

/// Rotates a local-frame vector into the world frame of `heading`.
inline Point rotate(Point v, double heading) {
  const double c = std::cos(heading), s = std::sin(heading);
  return {v.x * c - v.y * s, v.x * s + v.y * c};
}

/// Maps any finite angle into [0, 2*pi).
inline double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Smallest absolute difference between two bearings, in [0, pi].
inline double angular_offset(double bearing, double heading) {
  double d = std::fmod(std::fabs(bearing - heading), kTwoPi);
  if (d > kPi) d = kTwoPi - d;
  return d;
}

inline double bearing_to(Point from, Point to) { return std::atan2(to.y - from.y, to.x - from.x); }

struct Pose {
  Point position;
  double heading = 0.0;  // radians, kept in [0, 2*pi)

  Pose() = default;
  Pose(Point p, double h) : position(p), heading(normalize_angle(h)) {}
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Angular offset of `target` from the pose's facing. A target at the pose's
/// own position has offset 0.
inline double offset_from_heading(const Pose& pose, Point target) {
  const Point d = target - pose.position;
  if (d.x == 0.0 && d.y == 0.0) return 0.0;
  return angular_offset(std::atan2(d.y, d.x), pose.heading);
}

struct Cell {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline Point cell_center(Cell c) { return {c.x + 0.5, c.y + 0.5}; }

inline Cell cell_of(Point p) {
  return {static_cast<int>(std::floor(p.x)), static_cast<int>(std::floor(p.y))};
}

}  // namespace stealth
