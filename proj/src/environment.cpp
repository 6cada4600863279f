#include "arena/environment.hpp"

#include <cmath>
#include <numbers>

#include "arena/error.hpp"
#include "arena/grid.hpp"
#include "arena/random.hpp"

namespace arena {

namespace {

constexpr double kReferenceRadius = 0.2;
constexpr double kReferenceReach = 0.9;

double heading_error(const Pose2& pose, const Vec2& target) {
  return avertence_deg(pose, target) * std::numbers::pi / 180.0;
}

Pose2 pose_of(const BodyState& b) { return {b.x, b.y, b.theta}; }

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kNav: return "nav";
    case Task::kCombat: return "combat";
    case Task::kCombined: return "combined";
  }
  return "nav";
}

Task task_from_string(std::string_view name) {
  if (name == "nav") return Task::kNav;
  if (name == "combat") return Task::kCombat;
  if (name == "combined") return Task::kCombined;
  throw Error(ErrorCode::kConfig, "unknown task '" + std::string(name) + "'");
}

Environment::Environment(EnvConfig cfg)
    : cfg_(std::move(cfg)),
      layout_(cfg_.layout ? *cfg_.layout : generate_layout(level_spec(cfg_.level), cfg_.seed)),
      blue_(cfg_.params, cfg_.friction),
      red_(cfg_.params, cfg_.friction),
      has_red_(cfg_.task != Task::kNav),
      opponent_(layout_.patrol, cfg_.max_speed, cfg_.max_yaw_rate) {
  if (cfg_.max_speed <= 0.0 || cfg_.max_yaw_rate <= 0.0)
    throw Error(ErrorCode::kConfig, "speed limits must be positive");
  if (cfg_.time_limit <= 0.0) throw Error(ErrorCode::kConfig, "time_limit must be positive");
  if (cfg_.task != Task::kCombat && static_cast<int>(layout_.goals.size()) != kGoalCount)
    throw Error(ErrorCode::kConfig, "layout must hold five goals");
  reset();
}

bool Environment::confrontation() const {
  return has_red_ && combined_.phase == Phase::kConfrontation;
}

const Observation& Environment::reset() {
  const Pose2& b = layout_.blue_spawn;
  const Pose2& r = layout_.red_spawn;
  blue_.reset(BodyState{b.x, b.y, b.theta, 0.0, 0.0, 0.0});
  red_.reset(BodyState{r.x, r.y, r.theta, 0.0, 0.0, 0.0});
  opponent_ = BuiltinOpponent(layout_.patrol, cfg_.max_speed, cfg_.max_yaw_rate);
  sensor_rng_.seed(derive_seed(cfg_.seed, kSensorStream));
  odometry_ = OdometryState{b.x, b.y, b.theta, Eigen::Vector4d::Zero()};
  nav_ = NavTaskState{};
  combat_ = CombatState{};
  combined_ = CombinedState{};
  if (cfg_.task == Task::kCombat) {
    combined_.phase = Phase::kConfrontation;
    combined_.confrontation_active = true;
  }
  outcome_ = Outcome::kOngoing;
  red_cmd_ = ControlCommand{};
  ticks_ = 0;
  collision_ticks_ = 0;
  done_ = false;

  log_ = TrajectoryLog{};
  LogHeader& h = log_.header;
  h.task = std::string(to_string(cfg_.task));
  h.level = cfg_.level;
  h.seed = cfg_.seed;
  h.max_speed = cfg_.max_speed;
  h.time_limit = cfg_.time_limit;
  h.gamma = cfg_.gamma;
  h.policy = cfg_.policy;
  h.params = cfg_.params;
  h.params_hash = params_hash(cfg_.params);
  h.layout_hash = layout_hash(layout_);
  h.initial_pose = b;
  h.n_goals = kGoalCount;
  if (cfg_.task != Task::kCombat) {
    try {
      h.segment_lengths = activation_segments(b, layout_, kReferenceRadius, kReferenceReach);
    } catch (const Error&) {
      h.segment_lengths.clear();
    }
  }

  observe();
  if (obs_.target) {
    prev_distance_ = (*obs_.target - obs_.pose.position()).norm();
    prev_angle_ = heading_error(obs_.pose, *obs_.target);
  } else if (has_red_) {
    prev_distance_ = (obs_.enemy.position() - obs_.pose.position()).norm();
    prev_angle_ = heading_error(obs_.pose, obs_.enemy.position());
  }
  log_.summary = summarize();
  return obs_;
}

void Environment::observe() {
  const BodyObstacle red_body{pose_of(red_.body()), footprint_};
  const std::span<const BodyObstacle> others =
      has_red_ ? std::span<const BodyObstacle>(&red_body, 1) : std::span<const BodyObstacle>{};
  Observation& o = obs_;
  o.time = ticks_ * cfg_.params.control_dt;
  o.body = blue_.body();
  o.pose = pose_of(o.body);
  o.lidar = lidar_scan(o.pose, layout_, cfg_.params, sensor_rng_, others);
  o.lidar.timestamp = o.time;
  o.encoders = encoder_read(blue_.wheels(), cfg_.params, sensor_rng_);
  if (ticks_ > 0) odometry_ = odometry_step(odometry_, o.encoders, cfg_.params, cfg_.params.control_dt);
  o.odometry = odometry_;
  o.phase = combined_.phase;
  o.next_goal = nav_.next_goal;
  o.target.reset();
  if (cfg_.task != Task::kCombat && combined_.phase == Phase::kNavigation && !nav_.complete())
    o.target = layout_.goals[static_cast<std::size_t>(nav_.next_goal)].position;
  o.enemy_present = has_red_;
  if (has_red_) {
    o.enemy = red_body.pose;
    o.enemy_visible = line_of_sight(o.pose, red_body, layout_);
  } else {
    o.enemy = Pose2{};
    o.enemy_visible = false;
  }
  o.hp = combat_.blue.hp;
  o.bullets = combat_.blue.bullets;
  o.enemy_hp = combat_.red.hp;
}

StepResult Environment::step(const ControlCommand& cmd) {
  if (done_) throw Error(ErrorCode::kInvalidArgument, "step after the episode ended");
  const SimParams& p = cfg_.params;
  const ControlCommand commanded = clamp_command(cmd, cfg_.max_speed, cfg_.max_yaw_rate);
  std::vector<std::string> events;

  // Opponent decides from the state at the start of the tick.
  if (has_red_) {
    OpponentObservation ro;
    ro.self = pose_of(red_.body());
    ro.enemy = pose_of(blue_.body());
    ro.line_of_sight = line_of_sight(ro.self, BodyObstacle{ro.enemy, footprint_}, layout_);
    ro.bullets = combat_.red.bullets;
    ro.active = confrontation() && combat_.red.alive();
    red_cmd_ = opponent_.act(ro);
  }

  ControlCommand blue_eff = blue_.delay(commanded);
  ControlCommand red_eff = has_red_ ? red_.delay(red_cmd_) : ControlCommand{};
  if (!combat_.blue.alive()) blue_eff = ControlCommand{};
  if (!combat_.red.alive()) red_eff = ControlCommand{};

  bool collided = false;
  double delta = 0.0;
  for (int k = 0; k < p.substeps(); ++k) {
    const BodyState blue_prev = blue_.body();
    const BodyState red_prev = red_.body();
    const Vec2 before = blue_prev.position();
    blue_.step_physics(blue_eff);
    if (has_red_) red_.step_physics(red_eff);
    {
      const BodyObstacle other{pose_of(red_.body()), footprint_};
      const SettleResult s = settle(blue_.body(), blue_prev, footprint_, layout_,
                                    has_red_ ? std::span<const BodyObstacle>(&other, 1)
                                             : std::span<const BodyObstacle>{});
      blue_.body() = s.body;
      collided = collided || s.collided;
    }
    if (has_red_) {
      const BodyObstacle other{pose_of(blue_.body()), footprint_};
      red_.body() = settle(red_.body(), red_prev, footprint_, layout_,
                           std::span<const BodyObstacle>(&other, 1))
                        .body;
    }
    delta += (blue_.body().position() - before).norm();
  }

  const int damage_before = combat_.blue.damage_dealt;
  if (confrontation()) {
    const BodyObstacle blue_body{pose_of(blue_.body()), footprint_};
    const BodyObstacle red_body{pose_of(red_.body()), footprint_};
    if (blue_eff.fire) {
      const ShotResult s = apply_shot(Side::kBlue, blue_body, red_body, layout_, combat_);
      if (s.fired) events.emplace_back("fire:blue");
      if (s.hit) events.emplace_back("hit:red");
    }
    if (red_eff.fire) {
      const ShotResult s = apply_shot(Side::kRed, red_body, blue_body, layout_, combat_);
      if (s.fired) events.emplace_back("fire:red");
      if (s.hit) events.emplace_back("hit:blue");
    }
  }
  advance_clock(combat_, p.control_dt);
  ++ticks_;
  const double t = ticks_ * p.control_dt;

  // Referee.
  const Pose2 pose = pose_of(blue_.body());
  double reward = 0.0;
  if (cfg_.task != Task::kCombat && combined_.phase == Phase::kNavigation) {
    const Vec2 target = layout_.goals[static_cast<std::size_t>(nav_.next_goal)].position;
    NavRewardInput in;
    in.d_t = (target - pose.position()).norm();
    in.d_prev = prev_distance_;
    in.dtheta_t = heading_error(pose, target);
    in.dtheta_prev = prev_angle_;
    in.training_iteration = cfg_.training_iteration;
    in.collision_weight = cfg_.collision_weight;
    in.collided = collided;
    if (const auto g = check_activation(pose, target, nav_)) {
      in.activated = true;
      events.push_back(std::string("activate:") + layout_.goals[static_cast<std::size_t>(*g)].label);
    }
    reward = nav_reward(in, cfg_.reward);
    if (cfg_.task == Task::kCombined) {
      combined_.advance(nav_, outcome_);
      if (combined_.phase == Phase::kConfrontation) events.emplace_back("phase:confrontation");
    }
  } else if (confrontation()) {
    outcome_ = win_condition(combat_, cfg_.time_limit);
    const Vec2 enemy = red_.body().position();
    CombatRewardInput in;
    in.d_t = (enemy - pose.position()).norm();
    in.d_prev = prev_distance_;
    in.dtheta_t = heading_error(pose, enemy);
    in.dtheta_prev = prev_angle_;
    in.damage = combat_.blue.damage_dealt - damage_before;
    in.hp = combat_.blue.hp;
    in.won = outcome_ == Outcome::kBlueWins;
    reward = combat_reward(in, cfg_.reward);
    combined_.advance(nav_, outcome_);
    if (outcome_ != Outcome::kOngoing) events.push_back("outcome:" + std::string(to_string(outcome_)));
  }

  if (collided) ++collision_ticks_;
  combined_.collision_time = collision_ticks_ * p.control_dt;
  combined_.elapsed = t;

  const bool timeout = t >= cfg_.time_limit - 1e-9;
  if (cfg_.task == Task::kNav)
    done_ = nav_.complete() || timeout;
  else
    done_ = outcome_ != Outcome::kOngoing || timeout;
  if (timeout && outcome_ == Outcome::kOngoing && !(cfg_.task == Task::kNav && nav_.complete()))
    events.emplace_back("timeout");

  observe();
  if (obs_.target) {
    prev_distance_ = (*obs_.target - obs_.pose.position()).norm();
    prev_angle_ = heading_error(obs_.pose, *obs_.target);
  } else if (has_red_) {
    prev_distance_ = (obs_.enemy.position() - obs_.pose.position()).norm();
    prev_angle_ = heading_error(obs_.pose, obs_.enemy.position());
  }

  LogRecord rec;
  rec.t = t;
  rec.pose = {obs_.body.x, obs_.body.y, obs_.body.theta};
  rec.vel = {obs_.body.v_x, obs_.body.v_y, obs_.body.v_w};
  rec.odom = {odometry_.x, odometry_.y, odometry_.theta};
  rec.cmd = {commanded.u_x, commanded.u_y, commanded.u_w, commanded.fire ? 1.0 : 0.0};
  rec.collision = collided;
  rec.delta = delta;
  rec.reward = reward;
  rec.events = std::move(events);
  log_.records.push_back(std::move(rec));
  log_.summary = summarize();

  return {obs_, reward, done_};
}

LogSummary Environment::summarize() const {
  LogSummary s;
  s.activated = nav_.next_goal;
  s.hp = combat_.blue.hp;
  s.damage = combat_.blue.damage_dealt;
  s.elapsed = ticks_ * cfg_.params.control_dt;
  s.collision_time = collision_ticks_ * cfg_.params.control_dt;
  s.confrontation_active = cfg_.task != Task::kNav && combined_.confrontation_active;
  switch (cfg_.task) {
    case Task::kNav:
      s.success = nav_.complete();
      s.outcome = nav_.complete() ? "complete" : (done_ ? "timeout" : "ongoing");
      break;
    case Task::kCombat:
      s.success = outcome_ == Outcome::kBlueWins;
      s.outcome = outcome_ == Outcome::kOngoing && done_ ? "timeout" : std::string(to_string(outcome_));
      break;
    case Task::kCombined:
      s.success = nav_.complete();
      s.outcome = outcome_ == Outcome::kOngoing && done_ ? "timeout" : std::string(to_string(outcome_));
      break;
  }
  return s;
}

}  // namespace arena
