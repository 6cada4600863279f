#pragma once

#include <Eigen/Core>

namespace arena {

/// Wheel indices follow the chassis convention: 0 = right-front, 1 = left-front,
/// 2 = left-rear, 3 = right-rear (wheels 1..4 in the model equations).
template <typename Scalar>
using WheelVector = Eigen::Matrix<Scalar, 4, 1>;

/// Body twist (v_x, v_y, v_w) in the robot frame.
template <typename Scalar>
using Twist = Eigen::Matrix<Scalar, 3, 1>;

/// Maps a body twist to wheel angular speeds:
///   w1 = (ux - uy - uw (h+w)/2) / r      w2 = (ux + uy + uw (h+w)/2) / r
///   w3 = (ux + uy - uw (h+w)/2) / r      w4 = (ux - uy + uw (h+w)/2) / r
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 3> inverse_kinematics_matrix(Scalar r_w, Scalar h, Scalar w) {
  const Scalar k = (h + w) / Scalar(2);
  Eigen::Matrix<Scalar, 4, 3> m;
  m << 1, -1, -k,
       1,  1,  k,
       1,  1, -k,
       1, -1,  k;
  return m / r_w;
}

/// Maps wheel speeds to the body twist:
///   vx = (w3 + w4) r / 2,  vy = (w3 - w1) r / 2,  vw = (w2 - w3) r / (h + w)
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 4> forward_kinematics_matrix(Scalar r_w, Scalar h, Scalar w) {
  const Scalar half = r_w / Scalar(2);
  const Scalar yaw = r_w / (h + w);
  Eigen::Matrix<Scalar, 3, 4> m;
  m << 0,     0,    half, half,
       -half, 0,    half, 0,
       0,     yaw,  -yaw, 0;
  return m;
}

template <typename Scalar, typename Derived>
WheelVector<Scalar> wheel_speeds_for(const Eigen::MatrixBase<Derived>& twist, Scalar r_w, Scalar h,
                                     Scalar w) {
  return inverse_kinematics_matrix<Scalar>(r_w, h, w) * twist;
}

template <typename Scalar, typename Derived>
Twist<Scalar> twist_for(const Eigen::MatrixBase<Derived>& wheels, Scalar r_w, Scalar h, Scalar w) {
  return forward_kinematics_matrix<Scalar>(r_w, h, w) * wheels;
}

/// Contact positions of the four wheels in the body frame (x forward, y left).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 4> wheel_positions(Scalar h, Scalar w) {
  const Scalar a = h / Scalar(2);
  const Scalar b = w / Scalar(2);
  Eigen::Matrix<Scalar, 2, 4> p;
  p << a, a, -a, -a,
      -b, b, b, -b;
  return p;
}

}  // namespace arena
