#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arena/environment.hpp"
#include "arena/grid.hpp"

namespace arena {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual ControlCommand act(const Observation& obs) = 0;
  /// True once the policy has given up (e.g. an unreachable goal).
  virtual bool failed() const { return false; }
};

struct PursuitOptions {
  double inflation = 0.25;
  double reach = 0.8;       ///< plan into this radius around the goal
  double lookahead = 0.4;
  double heading_gain = 3.0;
  int replan_ticks = 10;
};

/// Follows the grid shortest path to the current goal by holonomic pure
/// pursuit while a proportional controller turns the heading towards the
/// goal. Inside the activation zone it only rotates.
class ScriptedNavPolicy : public Policy {
 public:
  ScriptedNavPolicy(const ArenaLayout& layout, double max_speed, double max_yaw_rate,
                    PursuitOptions opts = {});

  ControlCommand act(const Observation& obs) override;
  bool failed() const override { return failed_; }

  /// Drive towards `target`, turning to face `face`.
  ControlCommand pursue(const Pose2& pose, const Vec2& target, const Vec2& face, double reach);

 private:
  std::vector<Vec2> lookahead_path(const Pose2& pose) const;

  OccupancyGrid grid_;
  double max_speed_;
  double max_yaw_rate_;
  PursuitOptions opts_;
  std::optional<GridPath> path_;
  Vec2 planned_target_ = Vec2::Constant(-1.0);
  int since_plan_ = 0;
  bool failed_ = false;
};

/// Navigation while goals remain, then engages the opponent: faces and fires
/// when the line of sight is clear, otherwise paths towards it.
class ScriptedCombatPolicy : public Policy {
 public:
  ScriptedCombatPolicy(const ArenaLayout& layout, double max_speed, double max_yaw_rate);

  ControlCommand act(const Observation& obs) override;
  bool failed() const override { return nav_.failed(); }

 private:
  ScriptedNavPolicy nav_;
  double max_yaw_rate_;
};

/// Replays a fixed command list, then holds still.
class CommandSequencePolicy : public Policy {
 public:
  explicit CommandSequencePolicy(std::vector<ControlCommand> commands)
      : commands_(std::move(commands)) {}
  ControlCommand act(const Observation& obs) override;

 private:
  std::vector<ControlCommand> commands_;
  std::size_t next_ = 0;
};

/// One "u_x,u_y,u_w[,fire]" line per tick; blank lines and '#' comments skipped.
std::vector<ControlCommand> load_commands(const std::string& path);

/// "scripted-nav", "scripted-combat" or "external" (requires `commands`).
std::unique_ptr<Policy> make_policy(const std::string& name, const Environment& env,
                                    std::vector<ControlCommand> commands = {});

}  // namespace arena
