#include "arena/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arena/kinematics.hpp"

namespace arena {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kQuarter = kPi / 4.0;
constexpr double kMinContactSpeed = 1e-6;
}  // namespace

ControlCommand clamp_command(const ControlCommand& cmd, double max_speed, double max_yaw_rate) {
  ControlCommand out = cmd;
  out.u_x = std::clamp(cmd.u_x, -max_speed, max_speed);
  out.u_y = std::clamp(cmd.u_y, -max_speed, max_speed);
  out.u_w = std::clamp(cmd.u_w, -max_yaw_rate, max_yaw_rate);
  return out;
}

Eigen::Vector2d BodyState::world_velocity() const {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * v_x - s * v_y, s * v_x + c * v_y};
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Eigen::Vector4d inverse_kinematics(const ControlCommand& cmd, const SimParams& p) {
  return wheel_speeds_for(cmd.twist(), p.r_w, p.h, p.w);
}

Eigen::Vector3d body_velocity(const WheelState& wheels, const SimParams& p) {
  return twist_for(wheels.omega, p.r_w, p.h, p.w);
}

double pid_current(double setpoint, WheelState& wheels, int wheel, const SimParams& p, double dt) {
  const double err = setpoint - wheels.omega[wheel];
  const double derivative = (err - wheels.prev_err[wheel]) / dt;
  const double integral = wheels.integral_err[wheel] + err * dt;
  const double raw = p.kp * err + p.ki * integral + p.kd * derivative;
  wheels.prev_err[wheel] = err;
  if (std::abs(raw) <= p.max_current) {
    wheels.integral_err[wheel] = integral;
    return raw;
  }
  // saturated: keep the previous accumulator
  const double held = p.kp * err + p.ki * wheels.integral_err[wheel] + p.kd * derivative;
  return std::clamp(held, -p.max_current, p.max_current);
}

double normalize_friction_angle(double theta_v) {
  double a = std::fmod(theta_v + kQuarter, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;
  return a - kQuarter;
}

int friction_branch(double theta_v) {
  const double a = normalize_friction_angle(theta_v) + kQuarter;
  return std::min(3, static_cast<int>(std::floor(a / (kPi / 2.0))));
}

double dynamic_friction_branch(int wheel, int branch, double theta_v, double f_perp,
                               double f_par) {
  const double s = std::sin(theta_v - kQuarter);
  const double c = std::cos(theta_v - kQuarter);
  if (wheel == 0 || wheel == 2) {
    switch (branch) {
      case 0: return -f_perp * s + f_par * c;
      case 1: return f_perp * s + f_par * c;
      case 2: return f_perp * s - f_par * c;
      default: return -f_perp * s - f_par * c;
    }
  }
  switch (branch) {
    case 0: return f_perp * c - f_par * s;
    case 1: return f_perp * c + f_par * s;
    case 2: return -f_perp * c + f_par * s;
    default: return -f_perp * c - f_par * s;
  }
}

double dynamic_friction(int wheel, double theta_v, double f_perp, double f_par) {
  const double a = normalize_friction_angle(theta_v);
  return dynamic_friction_branch(wheel, friction_branch(a), a, f_perp, f_par);
}

double friction_force(int wheel, double theta_v, double omega, double current,
                      const SimParams& p) {
  if (std::abs(omega) <= p.omega_e) return p.c_t * current;
  const double magnitude = dynamic_friction(wheel, theta_v, p.f_perp, p.f_par);
  return std::copysign(magnitude, omega);
}

Eigen::Vector4d contact_directions(const Eigen::Vector3d& twist, const SimParams& p) {
  const Eigen::Matrix<double, 2, 4> pos = wheel_positions(p.h, p.w);
  const double body_dir =
      std::hypot(twist.x(), twist.y()) < kMinContactSpeed ? 0.0 : std::atan2(twist.y(), twist.x());
  Eigen::Vector4d dirs;
  for (int i = 0; i < 4; ++i) {
    const double vx = twist.x() - twist.z() * pos(1, i);
    const double vy = twist.y() + twist.z() * pos(0, i);
    dirs[i] = std::hypot(vx, vy) < kMinContactSpeed ? body_dir : std::atan2(vy, vx);
  }
  return dirs;
}

WheelState wheel_update(const WheelState& wheels, const Eigen::Vector4d& currents,
                        const Eigen::Vector4d& theta_v, const SimParams& p, double dt,
                        FrictionModel model) {
  WheelState next = wheels;
  for (int i = 0; i < 4; ++i) {
    const double friction = model == FrictionModel::kFull
                                ? friction_force(i, theta_v[i], wheels.omega[i], currents[i], p)
                                : 0.0;
    const double accel = (p.c_t * currents[i] - 4.0 * friction * p.r_w / p.mass) / p.rho_w;
    next.omega[i] =
        std::clamp(wheels.omega[i] + dt * accel, -p.max_wheel_speed, p.max_wheel_speed);
  }
  return next;
}

LatencyQueue::LatencyQueue(const SimParams& p) {
  ux_.buffer.assign(static_cast<std::size_t>(p.zeta_vx), 0.0);
  uy_.buffer.assign(static_cast<std::size_t>(p.zeta_vy), 0.0);
  uw_.buffer.assign(static_cast<std::size_t>(p.zeta_vw), 0.0);
  fire_.buffer.assign(static_cast<std::size_t>(p.zeta_s), 0.0);
}

double LatencyQueue::Channel::push(double value) {
  if (buffer.empty()) return value;
  const double out = buffer[head];
  buffer[head] = value;
  head = (head + 1) % buffer.size();
  return out;
}

ControlCommand LatencyQueue::apply(const ControlCommand& cmd) {
  ControlCommand out;
  out.u_x = ux_.push(cmd.u_x);
  out.u_y = uy_.push(cmd.u_y);
  out.u_w = uw_.push(cmd.u_w);
  out.fire = fire_.push(cmd.fire ? 1.0 : 0.0) != 0.0;
  return out;
}

void LatencyQueue::prime(const ControlCommand& cmd) {
  std::fill(ux_.buffer.begin(), ux_.buffer.end(), cmd.u_x);
  std::fill(uy_.buffer.begin(), uy_.buffer.end(), cmd.u_y);
  std::fill(uw_.buffer.begin(), uw_.buffer.end(), cmd.u_w);
  std::fill(fire_.buffer.begin(), fire_.buffer.end(), cmd.fire ? 1.0 : 0.0);
}

std::pair<BodyState, WheelState> step_physics(const BodyState& body, const WheelState& wheels,
                                              const ControlCommand& effective,
                                              const SimParams& p, FrictionModel model) {
  const double dt = p.physics_dt;
  const Eigen::Vector4d setpoints = inverse_kinematics(effective, p);
  WheelState next = wheels;
  Eigen::Vector4d currents;
  for (int i = 0; i < 4; ++i) currents[i] = pid_current(setpoints[i], next, i, p, dt);

  const Eigen::Vector3d twist = body_velocity(wheels, p);
  next = wheel_update(next, currents, contact_directions(twist, p), p, dt, model);

  const Eigen::Vector3d v = body_velocity(next, p);
  BodyState out = body;
  out.v_x = v.x();
  out.v_y = v.y();
  out.v_w = v.z();
  const double c = std::cos(body.theta), s = std::sin(body.theta);
  out.x += dt * (c * v.x() - s * v.y());
  out.y += dt * (s * v.x() + c * v.y());
  out.theta = wrap_angle(body.theta + dt * v.z());
  return {out, next};
}

Engine::Engine(SimParams params, FrictionModel model)
    : params_(std::move(params)), model_(model), latency_(params_) {
  validate(params_);
}

void Engine::reset(const BodyState& body) {
  body_ = body;
  wheels_ = WheelState{};
  latency_ = LatencyQueue(params_);
}

void Engine::step_physics(const ControlCommand& effective) {
  std::tie(body_, wheels_) = arena::step_physics(body_, wheels_, effective, params_, model_);
}

void Engine::step_control(const ControlCommand& cmd) {
  const ControlCommand effective = delay(cmd);
  for (int k = 0; k < params_.substeps(); ++k) step_physics(effective);
}

}  // namespace arena
