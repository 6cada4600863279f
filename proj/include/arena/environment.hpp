#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "arena/dynamics.hpp"
#include "arena/referee.hpp"
#include "arena/sensors.hpp"
#include "arena/trajectory_log.hpp"
#include "arena/world.hpp"

namespace arena {

enum class Task { kNav, kCombat, kCombined };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

struct EnvConfig {
  Task task = Task::kNav;
  int level = 1;
  std::uint64_t seed = 0;
  double max_speed = 1.0;
  double max_yaw_rate = 2.0;
  double time_limit = kMatchDuration;
  double gamma = 0.99;
  std::string policy = "scripted-nav";
  SimParams params;
  FrictionModel friction = FrictionModel::kFull;
  NavRewardOptions reward;
  double training_iteration = 0.0;
  double collision_weight = 1.0;
  /// Layout to use instead of generating one from (level, seed).
  std::optional<ArenaLayout> layout;
};

/// Everything a policy may look at after a tick. Scripted policies use the
/// ground-truth pose; the noisy channels sit alongside it.
struct Observation {
  double time = 0.0;
  Pose2 pose;
  BodyState body;
  OdometryState odometry;
  Eigen::Vector4d encoders = Eigen::Vector4d::Zero();
  LidarFrame lidar;
  Phase phase = Phase::kNavigation;
  int next_goal = 0;
  std::optional<Vec2> target;  ///< current goal position
  bool enemy_present = false;
  Pose2 enemy;
  bool enemy_visible = false;
  int hp = kInitialHp;
  int bullets = kInitialBullets;
  int enemy_hp = kInitialHp;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

/// Gym-style single-agent episode. Blue is the controlled robot; red is the
/// built-in opponent (absent in the navigation task). Deterministic in the
/// config.
class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  const Observation& reset();
  StepResult step(const ControlCommand& cmd);

  bool done() const { return done_; }
  const ArenaLayout& layout() const { return layout_; }
  const EnvConfig& config() const { return cfg_; }
  const Footprint& footprint() const { return footprint_; }
  const Observation& observation() const { return obs_; }
  const NavTaskState& nav() const { return nav_; }
  const CombatState& combat() const { return combat_; }
  const CombinedState& combined() const { return combined_; }
  Outcome outcome() const { return outcome_; }
  int ticks() const { return ticks_; }

  /// Header, every tick so far, and the current summary.
  const TrajectoryLog& log() const { return log_; }

 private:
  bool confrontation() const;
  void observe();
  LogSummary summarize() const;

  EnvConfig cfg_;
  ArenaLayout layout_;
  Footprint footprint_;
  Engine blue_;
  Engine red_;
  bool has_red_ = false;
  BuiltinOpponent opponent_;
  Rng sensor_rng_;
  OdometryState odometry_;
  NavTaskState nav_;
  CombatState combat_;
  CombinedState combined_;
  Outcome outcome_ = Outcome::kOngoing;
  Observation obs_;
  TrajectoryLog log_;
  ControlCommand red_cmd_;
  int ticks_ = 0;
  int collision_ticks_ = 0;
  bool done_ = false;
  double prev_distance_ = 0.0;
  double prev_angle_ = 0.0;
};

}  // namespace arena
