#include "arena/referee.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "arena/error.hpp"

namespace arena {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

double avertence_deg(const Pose2& robot, const Vec2& target) {
  const Vec2 to = target - robot.position();
  if (to.norm() == 0.0) return 0.0;
  const double bearing = std::atan2(to.y(), to.x());
  return std::abs(wrap_angle(bearing - robot.theta)) * kRadToDeg;
}

std::optional<int> check_activation(const Pose2& robot, const Vec2& goal_position,
                                    NavTaskState& nav) {
  if (nav.complete()) return std::nullopt;
  const double d = (goal_position - robot.position()).norm();
  if (d < kActivationDistance && avertence_deg(robot, goal_position) < kActivationAngleDeg) {
    const int idx = nav.next_goal;
    nav.activated[idx] = true;
    ++nav.next_goal;
    return idx;
  }
  return std::nullopt;
}

namespace {

double progress(double d_t, double d_prev, double th_t, double th_prev, bool flip) {
  const double p = (d_t - d_prev) + (std::abs(th_t) - std::abs(th_prev)) / 2.0;
  return flip ? -p : p;
}

}  // namespace

double nav_reward(const NavRewardInput& in, const NavRewardOptions& opts) {
  if (in.activated) return 40.0;
  const double curriculum = std::min(std::exp(in.training_iteration / 4000.0 - 5.0), 1.0);
  const bool penalize = opts.gate_collision ? in.collided : true;
  return progress(in.d_t, in.d_prev, in.dtheta_t, in.dtheta_prev, opts.flip_progress) -
         (penalize ? in.collision_weight * curriculum : 0.0) - 0.1;
}

double combat_reward(const CombatRewardInput& in, const NavRewardOptions& opts) {
  if (in.won) return 40.0 + in.hp / 2.0;
  return progress(in.d_t, in.d_prev, in.dtheta_t, in.dtheta_prev, opts.flip_progress) +
         in.damage / 20.0 - 0.1;
}

ShotResult apply_shot(Side shooter, const BodyObstacle& shooter_body,
                      const BodyObstacle& target_body, const ArenaLayout& layout,
                      CombatState& combat) {
  Fighter& self = combat.fighter(shooter);
  Fighter& target = combat.fighter(shooter == Side::kBlue ? Side::kRed : Side::kBlue);
  ShotResult r;
  if (!self.alive() || self.bullets <= 0 || self.cooldown > 1e-9) return r;
  r.fired = true;
  --self.bullets;
  self.cooldown = kShotCooldown;
  const Vec2 origin = shooter_body.pose.position();
  const Vec2 dir{std::cos(shooter_body.pose.theta), std::sin(shooter_body.pose.theta)};
  const auto t_target = ray_footprint(origin, dir, target_body);
  if (!t_target || !target.alive()) return r;
  const double t_block = raycast(origin, dir, layout, RayClass::kShot,
                                 std::numeric_limits<double>::infinity());
  if (*t_target < t_block) {
    r.hit = true;
    target.hp = std::max(0, target.hp - kHitDamage);
    self.damage_dealt += kHitDamage;
    ++self.hits;
  }
  return r;
}

void advance_clock(CombatState& combat, double dt) {
  combat.clock += dt;
  combat.blue.cooldown = std::max(0.0, combat.blue.cooldown - dt);
  combat.red.cooldown = std::max(0.0, combat.red.cooldown - dt);
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kOngoing: return "ongoing";
    case Outcome::kBlueWins: return "blue_wins";
    case Outcome::kRedWins: return "red_wins";
    case Outcome::kDraw: return "draw";
  }
  return "ongoing";
}

Outcome win_condition(const CombatState& c, double time_limit) {
  const bool blue_dead = !c.blue.alive();
  const bool red_dead = !c.red.alive();
  if (blue_dead && red_dead) return Outcome::kDraw;
  if (red_dead) return Outcome::kBlueWins;
  if (blue_dead) return Outcome::kRedWins;
  if (c.clock >= time_limit - 1e-9) {
    if (c.blue.hp > c.red.hp) return Outcome::kBlueWins;
    if (c.red.hp > c.blue.hp) return Outcome::kRedWins;
    return Outcome::kDraw;
  }
  return Outcome::kOngoing;
}

bool line_of_sight(const Pose2& from, const BodyObstacle& to, const ArenaLayout& layout) {
  const Vec2 delta = to.pose.position() - from.position();
  const double d = delta.norm();
  if (d == 0.0) return true;
  const Vec2 dir = delta / d;
  const auto t_target = ray_footprint(from.position(), dir, to);
  const double t_block = raycast(from.position(), dir, layout, RayClass::kShot,
                                 std::numeric_limits<double>::infinity());
  return t_target && *t_target < t_block;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kNavigation: return "navigation";
    case Phase::kConfrontation: return "confrontation";
    case Phase::kDone: return "done";
  }
  return "navigation";
}

void CombinedState::advance(const NavTaskState& nav, Outcome outcome) {
  if (phase == Phase::kNavigation && nav.complete()) {
    phase = Phase::kConfrontation;
    confrontation_active = true;
  }
  if (phase == Phase::kConfrontation && outcome != Outcome::kOngoing) phase = Phase::kDone;
}

double combined_score(std::span<const CombinedTrial> trials) {
  if (trials.empty()) throw Error(ErrorCode::kInvalidArgument, "combined_score needs at least one trial");
  double sum = 0.0;
  for (const auto& t : trials) {
    const double a = t.confrontation_active ? 1.0 : 0.0;
    sum += 60.0 * t.activated + 0.5 * a * (t.damage + t.hp) - t.elapsed - 20.0 * t.collision_time;
  }
  return sum / static_cast<double>(trials.size());
}

double final_score(double score_sim, double score_real) { return 0.2 * score_sim + 0.8 * score_real; }

BuiltinOpponent::BuiltinOpponent(std::vector<Vec2> patrol, double max_speed, double max_yaw_rate)
    : patrol_(std::move(patrol)), max_speed_(max_speed), max_yaw_rate_(max_yaw_rate) {}

ControlCommand BuiltinOpponent::act(const OpponentObservation& obs) {
  ControlCommand cmd;
  if (!obs.active) return cmd;
  const double yaw_gain = 3.0;
  if (obs.line_of_sight) {
    const Vec2 to = obs.enemy.position() - obs.self.position();
    const double err = wrap_angle(std::atan2(to.y(), to.x()) - obs.self.theta);
    cmd.u_w = std::clamp(yaw_gain * err, -max_yaw_rate_, max_yaw_rate_);
    cmd.fire = std::abs(err) * kRadToDeg < kFireAlignmentDeg && obs.bullets > 0;
    return cmd;
  }
  if (patrol_.empty()) return cmd;
  Vec2 to = patrol_[waypoint_] - obs.self.position();
  if (to.norm() < 0.15) {
    waypoint_ = (waypoint_ + 1) % patrol_.size();
    to = patrol_[waypoint_] - obs.self.position();
  }
  const double speed = std::min(max_speed_, 1.5 * to.norm());
  const Vec2 local = rotate(to.normalized() * speed, -obs.self.theta);
  cmd.u_x = local.x();
  cmd.u_y = local.y();
  // scan while patrolling
  cmd.u_w = std::clamp(yaw_gain * wrap_angle(std::atan2(to.y(), to.x()) - obs.self.theta),
                       -max_yaw_rate_, max_yaw_rate_);
  return cmd;
}

}  // namespace arena
