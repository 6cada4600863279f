#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arena/dynamics.hpp"
#include "arena/world.hpp"

namespace arena {

inline constexpr double kActivationDistance = 1.0;
inline constexpr double kActivationAngleDeg = 30.0;
inline constexpr int kInitialHp = 800;
inline constexpr int kInitialBullets = 24;
inline constexpr int kHitDamage = 100;
inline constexpr double kMatchDuration = 180.0;
inline constexpr double kShotCooldown = 0.5;

/// Angle in degrees between the robot heading and the robot-to-target ray, in [0, 180].
double avertence_deg(const Pose2& robot, const Vec2& target);

struct NavTaskState {
  int next_goal = 0;
  std::array<bool, kGoalCount> activated{};

  bool complete() const { return next_goal >= kGoalCount; }
};

/// Activates the current alphabetical target iff distance < 1.0 m and
/// avertence < 30 degrees. Returns the activated goal index.
std::optional<int> check_activation(const Pose2& robot, const Vec2& goal_position,
                                    NavTaskState& nav);

struct NavRewardOptions {
  /// Apply the collision term only on ticks with a collision.
  bool gate_collision = true;
  /// Negate the progress terms (previous minus current).
  bool flip_progress = false;
};

struct NavRewardInput {
  double d_t = 0.0;
  double d_prev = 0.0;
  double dtheta_t = 0.0;
  double dtheta_prev = 0.0;
  double training_iteration = 0.0;
  double collision_weight = 1.0;
  bool collided = false;
  bool activated = false;
};

double nav_reward(const NavRewardInput& in, const NavRewardOptions& opts = {});

struct CombatRewardInput {
  double d_t = 0.0;
  double d_prev = 0.0;
  double dtheta_t = 0.0;
  double dtheta_prev = 0.0;
  double damage = 0.0;
  double hp = kInitialHp;
  bool won = false;
};

double combat_reward(const CombatRewardInput& in, const NavRewardOptions& opts = {});

enum class Side { kBlue, kRed };

struct Fighter {
  int hp = kInitialHp;
  int bullets = kInitialBullets;
  int damage_dealt = 0;
  int hits = 0;
  double cooldown = 0.0;

  bool alive() const { return hp > 0; }
};

struct CombatState {
  Fighter blue;
  Fighter red;
  double clock = 0.0;

  Fighter& fighter(Side s) { return s == Side::kBlue ? blue : red; }
  const Fighter& fighter(Side s) const { return s == Side::kBlue ? blue : red; }
};

struct ShotResult {
  bool fired = false;
  bool hit = false;
};

/// Resolves one shot along the shooter heading. Instant hit-scan: the target
/// loses 100 HP if its footprint is closer than any shot blocker.
ShotResult apply_shot(Side shooter, const BodyObstacle& shooter_body,
                      const BodyObstacle& target_body, const ArenaLayout& layout,
                      CombatState& combat);

/// Advances the match clock and shot cooldowns.
void advance_clock(CombatState& combat, double dt);

enum class Outcome { kOngoing, kBlueWins, kRedWins, kDraw };

std::string_view to_string(Outcome outcome);

Outcome win_condition(const CombatState& combat, double time_limit = kMatchDuration);

/// True when a shot from `from` towards `to` is not blocked.
bool line_of_sight(const Pose2& from, const BodyObstacle& to, const ArenaLayout& layout);

enum class Phase { kNavigation, kConfrontation, kDone };

std::string_view to_string(Phase phase);

/// Combined task: navigation first, the opponent activates once all five
/// goals are activated.
struct CombinedState {
  Phase phase = Phase::kNavigation;
  bool confrontation_active = false;
  double collision_time = 0.0;
  double elapsed = 0.0;

  void advance(const NavTaskState& nav, Outcome outcome);
};

struct CombinedTrial {
  int activated = 0;
  bool confrontation_active = false;
  double damage = 0.0;
  double hp = 0.0;
  double elapsed = 0.0;
  double collision_time = 0.0;
};

/// Mean of 60 N_a + A (D + HP) / 2 - T - 20 T_c. Throws on an empty list.
double combined_score(std::span<const CombinedTrial> trials);

double final_score(double score_sim, double score_real);

struct OpponentObservation {
  Pose2 self;
  Pose2 enemy;
  bool line_of_sight = false;
  int bullets = 0;
  bool active = true;
};

/// Scripted red robot: faces and shoots the blue robot when visible,
/// otherwise patrols. Stationary while inactive.
class BuiltinOpponent {
 public:
  explicit BuiltinOpponent(std::vector<Vec2> patrol, double max_speed = 1.0,
                           double max_yaw_rate = 2.0);

  ControlCommand act(const OpponentObservation& obs);
  std::size_t waypoint() const { return waypoint_; }

 private:
  std::vector<Vec2> patrol_;
  std::size_t waypoint_ = 0;
  double max_speed_;
  double max_yaw_rate_;
};

inline constexpr double kFireAlignmentDeg = 5.0;

}  // namespace arena
