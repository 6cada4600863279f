#include "arena/policies.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "arena/error.hpp"

namespace arena {

namespace {

constexpr double kRotateOnlyDistance = 0.85;
constexpr double kReplanShift = 0.3;
constexpr double kMinCruise = 0.15;
constexpr double kApproachGain = 1.2;
constexpr double kEngageReach = 1.0;

double bearing_error(const Pose2& pose, const Vec2& target) {
  const Vec2 to = target - pose.position();
  return wrap_angle(std::atan2(to.y(), to.x()) - pose.theta);
}

}  // namespace

ScriptedNavPolicy::ScriptedNavPolicy(const ArenaLayout& layout, double max_speed,
                                     double max_yaw_rate, PursuitOptions opts)
    : grid_(layout, opts.inflation),
      max_speed_(max_speed),
      max_yaw_rate_(max_yaw_rate),
      opts_(opts) {}

ControlCommand ScriptedNavPolicy::act(const Observation& obs) {
  if (!obs.target) return {};
  const Vec2 target = *obs.target;
  if ((target - obs.pose.position()).norm() < kRotateOnlyDistance) {
    ControlCommand cmd;
    cmd.u_w = std::clamp(opts_.heading_gain * bearing_error(obs.pose, target), -max_yaw_rate_,
                         max_yaw_rate_);
    return cmd;
  }
  return pursue(obs.pose, target, target, opts_.reach);
}

ControlCommand ScriptedNavPolicy::pursue(const Pose2& pose, const Vec2& target, const Vec2& face,
                                         double reach) {
  const Vec2 pos = pose.position();
  if (!path_ || (target - planned_target_).norm() > kReplanShift ||
      since_plan_ >= opts_.replan_ticks) {
    path_ = plan_to_region(grid_, pos, target, reach);
    planned_target_ = target;
    since_plan_ = 0;
    if (!path_) {
      failed_ = true;
      return {};
    }
  }
  ++since_plan_;

  ControlCommand cmd;
  cmd.u_w = std::clamp(opts_.heading_gain * bearing_error(pose, face), -max_yaw_rate_, max_yaw_rate_);

  const auto& wp = path_->waypoints;
  Vec2 aim = target;
  double remaining = (target - pos).norm();
  if (!wp.empty()) {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < wp.size(); ++i) {
      const double d = (wp[i] - pos).norm();
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    aim = wp.back();
    for (std::size_t i = nearest; i < wp.size(); ++i) {
      if ((wp[i] - pos).norm() >= opts_.lookahead) {
        aim = wp[i];
        break;
      }
    }
    remaining = best;
    for (std::size_t i = nearest + 1; i < wp.size(); ++i) remaining += (wp[i] - wp[i - 1]).norm();
  }
  const Vec2 to = aim - pos;
  if (to.norm() < 1e-6) return cmd;
  const double speed = std::min(max_speed_, std::max(kMinCruise, kApproachGain * remaining));
  const Vec2 local = rotate(to.normalized() * speed, -pose.theta);
  cmd.u_x = local.x();
  cmd.u_y = local.y();
  return cmd;
}

ScriptedCombatPolicy::ScriptedCombatPolicy(const ArenaLayout& layout, double max_speed,
                                           double max_yaw_rate)
    : nav_(layout, max_speed, max_yaw_rate), max_yaw_rate_(max_yaw_rate) {}

ControlCommand ScriptedCombatPolicy::act(const Observation& obs) {
  if (obs.phase == Phase::kNavigation && obs.target) return nav_.act(obs);
  if (!obs.enemy_present || obs.phase != Phase::kConfrontation) return {};
  const Vec2 enemy = obs.enemy.position();
  if (obs.enemy_visible) {
    const double err = bearing_error(obs.pose, enemy);
    ControlCommand cmd;
    cmd.u_w = std::clamp(3.0 * err, -max_yaw_rate_, max_yaw_rate_);
    cmd.fire = std::abs(err) * 180.0 / std::numbers::pi < kFireAlignmentDeg && obs.bullets > 0;
    return cmd;
  }
  return nav_.pursue(obs.pose, enemy, enemy, kEngageReach);
}

ControlCommand CommandSequencePolicy::act(const Observation&) {
  if (next_ >= commands_.size()) return {};
  return commands_[next_++];
}

std::vector<ControlCommand> load_commands(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open command file " + path);
  std::vector<ControlCommand> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<double> v;
    double x;
    while (fields >> x) v.push_back(x);
    if (!fields.eof() || (v.size() != 3 && v.size() != 4))
      throw Error(ErrorCode::kConfig,
                  path + ":" + std::to_string(line_no) + ": expected u_x,u_y,u_w[,fire]");
    out.push_back({v[0], v[1], v[2], v.size() == 4 && v[3] != 0.0});
  }
  return out;
}

std::unique_ptr<Policy> make_policy(const std::string& name, const Environment& env,
                                    std::vector<ControlCommand> commands) {
  const EnvConfig& c = env.config();
  if (name == "scripted-nav")
    return std::make_unique<ScriptedNavPolicy>(env.layout(), c.max_speed, c.max_yaw_rate);
  if (name == "scripted-combat")
    return std::make_unique<ScriptedCombatPolicy>(env.layout(), c.max_speed, c.max_yaw_rate);
  if (name == "external") return std::make_unique<CommandSequencePolicy>(std::move(commands));
  throw Error(ErrorCode::kConfig, "unknown policy '" + name + "'");
}

}  // namespace arena
