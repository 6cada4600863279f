#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

namespace arena {

using Vec2 = Eigen::Vector2d;

Vec2 rotate(const Vec2& v, double angle);

/// Rectangle with arbitrary orientation.
struct OrientedBox {
  Vec2 center = Vec2::Zero();
  Vec2 half_extents = Vec2::Zero();
  double rotation = 0.0;

  std::array<Vec2, 4> corners() const;
  /// Unit axes of the box frame.
  std::array<Vec2, 2> axes() const;
  Vec2 to_local(const Vec2& world) const;
  Vec2 closest_point(const Vec2& world) const;
  bool contains(const Vec2& world) const;
  /// Distance from `p` to the box (0 inside).
  double distance(const Vec2& p) const;
};

struct Circle {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

/// Axis-aligned rectangle [min, max].
struct AlignedRect {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();

  bool contains(const Vec2& p) const;
  bool contains(const OrientedBox& box) const;
  bool intersects(const OrientedBox& box) const;
};

/// Penetration report. `normal` points out of the obstacle, towards the
/// body being tested. Overlap is strict: `depth` > 0 only.
struct Contact {
  bool colliding = false;
  Vec2 normal = Vec2::Zero();
  double depth = 0.0;
};

Contact circle_vs_box(const Circle& circle, const OrientedBox& box);
/// Separating-axis test; normal points from `other` towards `body`.
Contact box_vs_box(const OrientedBox& body, const OrientedBox& other);
Contact circle_vs_circle(const Circle& body, const Circle& other);

/// Containment in [0, width] x [0, height]; normal points inward.
Contact circle_vs_bounds(const Circle& circle, double width, double height);
Contact box_vs_bounds(const OrientedBox& box, double width, double height);

/// Ray parameter of the first hit with t >= 0. The ray direction must be unit.
std::optional<double> ray_box(const Vec2& origin, const Vec2& dir, const OrientedBox& box);
std::optional<double> ray_circle(const Vec2& origin, const Vec2& dir, const Circle& circle);
/// Distance to the arena boundary from an interior point.
double ray_bounds(const Vec2& origin, const Vec2& dir, double width, double height);

bool overlaps(const OrientedBox& a, const OrientedBox& b);
/// Minimum distance between two boxes (0 when overlapping).
double box_distance(const OrientedBox& a, const OrientedBox& b);

}  // namespace arena
