#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "arena/params.hpp"

namespace arena {

/// Commanded body twist plus the shoot request.
struct ControlCommand {
  double u_x = 0.0;
  double u_y = 0.0;
  double u_w = 0.0;
  bool fire = false;

  Eigen::Vector3d twist() const { return {u_x, u_y, u_w}; }
  friend bool operator==(const ControlCommand&, const ControlCommand&) = default;
};

/// Clamps linear components to +-max_speed and yaw rate to +-max_yaw_rate.
ControlCommand clamp_command(const ControlCommand& cmd, double max_speed, double max_yaw_rate);

/// Pose in the arena frame, velocities in the body frame.
struct BodyState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v_x = 0.0;
  double v_y = 0.0;
  double v_w = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
  /// Linear velocity rotated into the arena frame.
  Eigen::Vector2d world_velocity() const;
  friend bool operator==(const BodyState&, const BodyState&) = default;
};

/// Wraps to (-pi, pi].
double wrap_angle(double a);

/// Per-wheel angular speeds and PID accumulators. Index 0..3 maps to wheels
/// right-front, left-front, left-rear, right-rear.
struct WheelState {
  Eigen::Vector4d omega = Eigen::Vector4d::Zero();
  Eigen::Vector4d integral_err = Eigen::Vector4d::Zero();
  Eigen::Vector4d prev_err = Eigen::Vector4d::Zero();

  friend bool operator==(const WheelState&, const WheelState&) = default;
};

enum class FrictionModel {
  kFull,  ///< static/dynamic branches with per-wheel roller geometry
  kNone,  ///< F_f = 0, the simplified reference model
};

Eigen::Vector4d inverse_kinematics(const ControlCommand& cmd, const SimParams& params);
Eigen::Vector3d body_velocity(const WheelState& wheels, const SimParams& params);

/// PID output current for one wheel; updates that wheel's accumulators.
/// The integral is frozen while the output saturates at +-max_current.
double pid_current(double setpoint, WheelState& wheels, int wheel, const SimParams& params,
                   double dt);

/// Maps an angle into [-pi/4, 7pi/4).
double normalize_friction_angle(double theta_v);

/// Branch 0..3 of the friction table for an angle in [-pi/4, 7pi/4).
int friction_branch(double theta_v);

/// Dynamic friction magnitude f_d from the roller tables. Wheels 0 and 2 share
/// one roller orientation, wheels 1 and 3 the other.
double dynamic_friction(int wheel, double theta_v, double f_perp, double f_par);

/// Same table with the branch forced, for boundary-limit checks.
double dynamic_friction_branch(int wheel, int branch, double theta_v, double f_perp, double f_par);

/// Wheel friction force. Static branch (|omega| <= omega_e): C_T * I.
/// Dynamic branch: f_d signed against the wheel's rotation.
double friction_force(int wheel, double theta_v, double omega, double current,
                      const SimParams& params);

/// Direction of each wheel's contact-point velocity in the body frame. Falls
/// back to the body velocity direction (then 0) when the speed is negligible.
Eigen::Vector4d contact_directions(const Eigen::Vector3d& twist, const SimParams& params);

/// Explicit-Euler wheel update: w += dt (C_T I - 4 F r_w / M) / rho_w, clamped.
WheelState wheel_update(const WheelState& wheels, const Eigen::Vector4d& currents,
                        const Eigen::Vector4d& theta_v, const SimParams& params, double dt,
                        FrictionModel model = FrictionModel::kFull);

/// Delays u_x, u_y, u_w and fire independently by their latency in control
/// ticks. Queues start filled with zeros.
class LatencyQueue {
 public:
  LatencyQueue() = default;
  explicit LatencyQueue(const SimParams& params);

  ControlCommand apply(const ControlCommand& cmd);
  /// Fills every channel with `cmd`, as if it had been held forever.
  void prime(const ControlCommand& cmd);

 private:
  struct Channel {
    std::vector<double> buffer;
    std::size_t head = 0;
    double push(double value);
  };
  Channel ux_, uy_, uw_, fire_;
};

/// One physics step: setpoints, PID, friction, wheel update, forward
/// kinematics, then a semi-implicit pose update driven by the new velocities.
std::pair<BodyState, WheelState> step_physics(const BodyState& body, const WheelState& wheels,
                                              const ControlCommand& effective,
                                              const SimParams& params,
                                              FrictionModel model = FrictionModel::kFull);

/// A single robot's chassis. Owns its state; no shared mutable data.
class Engine {
 public:
  explicit Engine(SimParams params, FrictionModel model = FrictionModel::kFull);

  void reset(const BodyState& body);

  /// Runs the latency queues for one control tick.
  ControlCommand delay(const ControlCommand& cmd) { return latency_.apply(cmd); }
  void step_physics(const ControlCommand& effective);
  /// delay() followed by all physics substeps of one control tick, in free space.
  void step_control(const ControlCommand& cmd);

  const BodyState& body() const { return body_; }
  BodyState& body() { return body_; }
  const WheelState& wheels() const { return wheels_; }
  WheelState& wheels() { return wheels_; }
  LatencyQueue& latency() { return latency_; }
  const SimParams& params() const { return params_; }
  FrictionModel friction_model() const { return model_; }

 private:
  SimParams params_;
  FrictionModel model_;
  BodyState body_;
  WheelState wheels_;
  LatencyQueue latency_;
};

}  // namespace arena
