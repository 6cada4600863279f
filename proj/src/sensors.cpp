#include "arena/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace arena {

namespace {
constexpr double kMinRange = 0.01;
}

double lidar_beam_angle(int beam) {
  return (kLidarFirstBeamDeg + kLidarStepDeg * beam) * std::numbers::pi / 180.0;
}

int LidarFrame::anomaly_count() const {
  return static_cast<int>(std::count(anomalous.begin(), anomalous.end(), true));
}

std::array<double, kLidarBeams> lidar_truth(const Pose2& pose, const ArenaLayout& layout,
                                            const SimParams& params,
                                            std::span<const BodyObstacle> others) {
  std::array<double, kLidarBeams> ranges{};
  for (int i = 0; i < kLidarBeams; ++i) {
    const double a = pose.theta + lidar_beam_angle(i);
    ranges[i] = raycast(pose.position(), Vec2{std::cos(a), std::sin(a)}, layout, RayClass::kLidar,
                        params.max_range, others);
  }
  return ranges;
}

LidarFrame lidar_scan(const Pose2& pose, const ArenaLayout& layout, const SimParams& params,
                      Rng& rng, std::span<const BodyObstacle> others) {
  LidarFrame frame;
  frame.ranges = lidar_truth(pose, layout, params, others);
  if (params.sigma_l > 0.0) {
    std::normal_distribution<double> noise(params.mu_l, params.sigma_l);
    for (double& r : frame.ranges) r += noise(rng);
  } else if (params.mu_l != 0.0) {
    for (double& r : frame.ranges) r += params.mu_l;
  }

  int k = 0;
  if (params.lambda_anom > 0.0) {
    std::poisson_distribution<int> count(params.lambda_anom);
    k = std::min(count(rng), kLidarBeams);
  }
  // partial Fisher-Yates: the first k entries of `order` are the anomalous beams
  std::array<int, kLidarBeams> order{};
  std::iota(order.begin(), order.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, kLidarBeams - 1);
    std::swap(order[i], order[pick(rng)]);
    const int beam = order[i];
    frame.anomalous[beam] = true;
    switch (params.anomaly_mode) {
      case AnomalyMode::kDropout: frame.ranges[beam] = params.max_range; break;
      case AnomalyMode::kZero: frame.ranges[beam] = kMinRange; break;
      case AnomalyMode::kUniform: {
        std::uniform_real_distribution<double> u(kMinRange, params.max_range);
        frame.ranges[beam] = u(rng);
        break;
      }
    }
  }
  for (double& r : frame.ranges) r = std::clamp(r, kMinRange, params.max_range);
  return frame;
}

Eigen::Vector4d encoder_read(const WheelState& wheels, const SimParams& params, Rng& rng) {
  Eigen::Vector4d out = wheels.omega;
  if (params.sigma_e > 0.0) {
    std::normal_distribution<double> noise(params.mu_e, params.sigma_e);
    for (int i = 0; i < 4; ++i) out[i] += noise(rng);
  } else {
    out.array() += params.mu_e;
  }
  return out;
}

OdometryState odometry_step(const OdometryState& odo, const Eigen::Vector4d& measured,
                            const SimParams& params, double dt) {
  WheelState w;
  w.omega = measured;
  const Eigen::Vector3d v = body_velocity(w, params);
  OdometryState out = odo;
  const double c = std::cos(odo.theta), s = std::sin(odo.theta);
  out.x += dt * (c * v.x() - s * v.y());
  out.y += dt * (s * v.x() + c * v.y());
  out.theta = wrap_angle(odo.theta + dt * v.z());
  out.last_omega = measured;
  return out;
}

}  // namespace arena
