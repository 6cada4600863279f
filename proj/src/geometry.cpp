#include "arena/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arena {

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

std::array<Vec2, 2> OrientedBox::axes() const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  return {Vec2{c, s}, Vec2{-s, c}};
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const auto [ax, ay] = axes();
  const Vec2 ex = ax * half_extents.x();
  const Vec2 ey = ay * half_extents.y();
  return {center + ex + ey, center - ex + ey, center - ex - ey, center + ex - ey};
}

Vec2 OrientedBox::to_local(const Vec2& world) const { return rotate(world - center, -rotation); }

Vec2 OrientedBox::closest_point(const Vec2& world) const {
  const Vec2 local = to_local(world);
  const Vec2 clamped{std::clamp(local.x(), -half_extents.x(), half_extents.x()),
                     std::clamp(local.y(), -half_extents.y(), half_extents.y())};
  return center + rotate(clamped, rotation);
}

bool OrientedBox::contains(const Vec2& world) const {
  const Vec2 local = to_local(world);
  return std::abs(local.x()) <= half_extents.x() && std::abs(local.y()) <= half_extents.y();
}

double OrientedBox::distance(const Vec2& p) const { return (p - closest_point(p)).norm(); }

bool AlignedRect::contains(const Vec2& p) const {
  return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
}

bool AlignedRect::contains(const OrientedBox& box) const {
  for (const auto& c : box.corners())
    if (!contains(c)) return false;
  return true;
}

bool AlignedRect::intersects(const OrientedBox& box) const {
  const Vec2 half = (max - min) / 2.0;
  return overlaps(OrientedBox{(min + max) / 2.0, half, 0.0}, box);
}

Contact circle_vs_box(const Circle& circle, const OrientedBox& box) {
  const Vec2 local = box.to_local(circle.center);
  const Vec2& h = box.half_extents;
  const bool inside = std::abs(local.x()) <= h.x() && std::abs(local.y()) <= h.y();
  Contact c;
  if (!inside) {
    const Vec2 q{std::clamp(local.x(), -h.x(), h.x()), std::clamp(local.y(), -h.y(), h.y())};
    const Vec2 diff = local - q;
    const double d = diff.norm();
    if (d >= circle.radius) return c;
    c.colliding = true;
    c.depth = circle.radius - d;
    c.normal = rotate(diff / d, box.rotation);
    return c;
  }
  const double dx = h.x() - std::abs(local.x());
  const double dy = h.y() - std::abs(local.y());
  c.colliding = true;
  if (dx <= dy) {
    c.depth = circle.radius + dx;
    c.normal = rotate(Vec2{local.x() >= 0.0 ? 1.0 : -1.0, 0.0}, box.rotation);
  } else {
    c.depth = circle.radius + dy;
    c.normal = rotate(Vec2{0.0, local.y() >= 0.0 ? 1.0 : -1.0}, box.rotation);
  }
  return c;
}

namespace {

double projected_radius(const OrientedBox& b, const Vec2& axis) {
  const auto [ax, ay] = b.axes();
  return b.half_extents.x() * std::abs(ax.dot(axis)) + b.half_extents.y() * std::abs(ay.dot(axis));
}

}  // namespace

Contact box_vs_box(const OrientedBox& body, const OrientedBox& other) {
  const auto a = body.axes();
  const auto b = other.axes();
  const std::array<Vec2, 4> candidates{a[0], a[1], b[0], b[1]};
  const Vec2 d = body.center - other.center;
  Contact c;
  double best = std::numeric_limits<double>::infinity();
  Vec2 best_axis = Vec2::Zero();
  for (const Vec2& axis : candidates) {
    const double overlap =
        projected_radius(body, axis) + projected_radius(other, axis) - std::abs(d.dot(axis));
    if (overlap <= 0.0) return c;
    if (overlap < best) {
      best = overlap;
      best_axis = d.dot(axis) >= 0.0 ? axis : Vec2(-axis);
    }
  }
  c.colliding = true;
  c.depth = best;
  c.normal = best_axis;
  return c;
}

Contact circle_vs_circle(const Circle& body, const Circle& other) {
  const Vec2 d = body.center - other.center;
  const double dist = d.norm();
  Contact c;
  const double depth = body.radius + other.radius - dist;
  if (depth <= 0.0) return c;
  c.colliding = true;
  c.depth = depth;
  c.normal = dist > 0.0 ? Vec2(d / dist) : Vec2(1.0, 0.0);
  return c;
}

namespace {

Contact deepest_wall(const std::array<double, 4>& depths) {
  static const std::array<Vec2, 4> normals{Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}};
  Contact c;
  for (int i = 0; i < 4; ++i) {
    if (depths[i] > 0.0 && depths[i] > c.depth) {
      c.colliding = true;
      c.depth = depths[i];
      c.normal = normals[i];
    }
  }
  return c;
}

}  // namespace

Contact circle_vs_bounds(const Circle& circle, double width, double height) {
  const Vec2& p = circle.center;
  const double r = circle.radius;
  return deepest_wall({r - p.x(), r - (width - p.x()), r - p.y(), r - (height - p.y())});
}

Contact box_vs_bounds(const OrientedBox& box, double width, double height) {
  std::array<double, 4> depths{0, 0, 0, 0};
  for (const Vec2& q : box.corners()) {
    depths[0] = std::max(depths[0], -q.x());
    depths[1] = std::max(depths[1], q.x() - width);
    depths[2] = std::max(depths[2], -q.y());
    depths[3] = std::max(depths[3], q.y() - height);
  }
  return deepest_wall(depths);
}

std::optional<double> ray_box(const Vec2& origin, const Vec2& dir, const OrientedBox& box) {
  const Vec2 o = box.to_local(origin);
  const Vec2 d = rotate(dir, -box.rotation);
  double t_min = -std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 2; ++k) {
    const double h = box.half_extents[k];
    if (std::abs(d[k]) < 1e-15) {
      if (std::abs(o[k]) > h) return std::nullopt;
      continue;
    }
    double t1 = (-h - o[k]) / d[k];
    double t2 = (h - o[k]) / d[k];
    if (t1 > t2) std::swap(t1, t2);
    t_min = std::max(t_min, t1);
    t_max = std::min(t_max, t2);
    if (t_min > t_max) return std::nullopt;
  }
  if (t_max < 0.0) return std::nullopt;
  return std::max(t_min, 0.0);
}

std::optional<double> ray_circle(const Vec2& origin, const Vec2& dir, const Circle& circle) {
  const Vec2 m = origin - circle.center;
  const double b = m.dot(dir);
  const double c = m.squaredNorm() - circle.radius * circle.radius;
  if (c <= 0.0) return 0.0;
  if (b > 0.0) return std::nullopt;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  return -b - std::sqrt(disc);
}

double ray_bounds(const Vec2& origin, const Vec2& dir, double width, double height) {
  double t = std::numeric_limits<double>::infinity();
  if (dir.x() > 0.0) t = std::min(t, (width - origin.x()) / dir.x());
  if (dir.x() < 0.0) t = std::min(t, -origin.x() / dir.x());
  if (dir.y() > 0.0) t = std::min(t, (height - origin.y()) / dir.y());
  if (dir.y() < 0.0) t = std::min(t, -origin.y() / dir.y());
  return std::max(t, 0.0);
}

bool overlaps(const OrientedBox& a, const OrientedBox& b) { return box_vs_box(a, b).colliding; }

double box_distance(const OrientedBox& a, const OrientedBox& b) {
  if (overlaps(a, b)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (const Vec2& c : a.corners()) d = std::min(d, b.distance(c));
  for (const Vec2& c : b.corners()) d = std::min(d, a.distance(c));
  return d;
}

}  // namespace arena
