#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/dynamics.hpp"
#include "arena/geometry.hpp"

namespace arena {

enum class HeightClass {
  kLow,   ///< 0.10 m: blocks LiDAR only
  kHigh,  ///< 0.20 m: blocks LiDAR and shots
};

inline constexpr double kGoalHalfSize = 0.05;
inline constexpr int kGoalCount = 5;

struct Obstacle {
  OrientedBox box;
  HeightClass height = HeightClass::kHigh;
};

/// Goal block labelled 'A'..'E'. Always 0.20 m tall.
struct Goal {
  char label = 'A';
  Vec2 position = Vec2::Zero();
  double yaw = 0.0;

  OrientedBox box() const { return {position, Vec2{kGoalHalfSize, kGoalHalfSize}, yaw}; }
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  Vec2 position() const { return {x, y}; }
};

/// Arena geometry. The boundary wall encloses [0, width] x [0, height].
struct ArenaLayout {
  double width = 8.0;
  double height = 5.0;
  std::vector<Obstacle> obstacles;
  std::vector<Goal> goals;
  std::vector<AlignedRect> blocking_zones;
  Pose2 blue_spawn;
  Pose2 red_spawn;
  /// Patrol route of the built-in opponent.
  std::vector<Vec2> patrol;
};

/// Symmetric competition-style template (no goals).
ArenaLayout default_template();

/// Robot collision shape: a cylinder plus a box, rigidly attached to the pose.
struct Footprint {
  Vec2 circle_offset = Vec2::Zero();
  double radius = 0.16;
  Vec2 half_extents{0.16, 0.12};

  Circle circle_at(const Pose2& pose) const;
  OrientedBox box_at(const Pose2& pose) const;
  /// Radius of the smallest origin-centred circle enclosing both shapes.
  double bounding_radius() const;
};

struct LevelSpec {
  int level = 1;
  /// Goals that must lie inside blocking zones: 0, 1, 3 for levels 1..3.
  int goals_in_zones() const;
};

LevelSpec level_spec(int level);

/// Rejection-samples five goals for `level` on top of `layout_template`.
/// Deterministic in `seed`; throws Error(kLayoutGeneration) after 10000 rejections.
ArenaLayout generate_layout(const LevelSpec& level, std::uint64_t seed,
                            const ArenaLayout& layout_template = default_template());

bool goal_inside_zone(const Goal& goal, const ArenaLayout& layout);
bool goal_touches_zone(const Goal& goal, const ArenaLayout& layout);

/// Another body the robot can hit (the opponent).
struct BodyObstacle {
  Pose2 pose;
  Footprint footprint;
};

/// Deepest contact of the footprint against walls, obstacles, goal blocks and `others`.
Contact collide(const Pose2& pose, const Footprint& footprint, const ArenaLayout& layout,
                std::span<const BodyObstacle> others = {});

/// Pushes the body out along the contact normal and removes the velocity
/// component into the surface, keeping the tangential part.
BodyState resolve_collision(const BodyState& body, const Contact& contact);

struct SettleResult {
  BodyState body;
  bool collided = false;
};

/// Repeated resolve_collision after one physics step from `previous` to `moved`.
/// In a wedge the pushes may not converge; the body then returns to the
/// previous position with the velocity into the contact removed, so the final
/// penetration never exceeds the penetration at `previous`.
SettleResult settle(const BodyState& moved, const BodyState& previous, const Footprint& footprint,
                    const ArenaLayout& layout, std::span<const BodyObstacle> others = {},
                    int iterations = 8);

enum class RayClass {
  kLidar,  ///< blocked by LOW and HIGH obstacles and goals
  kShot,   ///< blocked by HIGH obstacles and goals only
};

/// Distance to the first blocker along a unit direction, capped at max_range.
double raycast(const Vec2& origin, const Vec2& dir, const ArenaLayout& layout, RayClass cls,
               double max_range, std::span<const BodyObstacle> others = {});

/// Ray distance to a body footprint (circle or box), if hit.
std::optional<double> ray_footprint(const Vec2& origin, const Vec2& dir, const BodyObstacle& body);

nlohmann::ordered_json to_json(const ArenaLayout& layout);
ArenaLayout layout_from_json(const nlohmann::json& j);
ArenaLayout load_layout(const std::string& path);
void save_layout(const std::string& path, const ArenaLayout& layout);
std::string layout_hash(const ArenaLayout& layout);

}  // namespace arena
