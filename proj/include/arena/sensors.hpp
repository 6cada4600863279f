#pragma once

#include <array>
#include <random>
#include <span>

#include <Eigen/Core>

#include "arena/dynamics.hpp"
#include "arena/world.hpp"

namespace arena {

/// Every stochastic component draws from an explicitly passed stream.
using Rng = std::mt19937_64;

inline constexpr int kLidarBeams = 61;
inline constexpr double kLidarFirstBeamDeg = -135.0;
inline constexpr double kLidarStepDeg = 4.5;

/// Beam angle relative to the robot heading, radians.
double lidar_beam_angle(int beam);

struct LidarFrame {
  std::array<double, kLidarBeams> ranges{};
  std::array<bool, kLidarBeams> anomalous{};
  double timestamp = 0.0;

  int anomaly_count() const;
};

/// Noise-free ranges from the robot centre.
std::array<double, kLidarBeams> lidar_truth(const Pose2& pose, const ArenaLayout& layout,
                                            const SimParams& params,
                                            std::span<const BodyObstacle> others = {});

/// Gaussian range noise on every beam, then a Poisson number of beams chosen
/// without replacement are overwritten by anomaly values.
LidarFrame lidar_scan(const Pose2& pose, const ArenaLayout& layout, const SimParams& params,
                      Rng& rng, std::span<const BodyObstacle> others = {});

/// Noisy encoder reading of each wheel speed.
Eigen::Vector4d encoder_read(const WheelState& wheels, const SimParams& params, Rng& rng);

struct OdometryState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  Eigen::Vector4d last_omega = Eigen::Vector4d::Zero();
};

/// Forward kinematics on the encoder readings, then one Euler step of the
/// pose integral using the odometry frame's own heading.
OdometryState odometry_step(const OdometryState& odo, const Eigen::Vector4d& measured,
                            const SimParams& params, double dt);

}  // namespace arena
