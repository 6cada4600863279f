#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "arena/dynamics.hpp"
#include "arena/trajectory_log.hpp"

namespace arena {

/// Builds the simulator the transformer is grounded against.
using EngineFactory = std::function<Engine()>;

/// Body velocity before a tick, the command, and the body velocity after it.
struct Transition {
  Eigen::Vector3d state;
  Eigen::Vector3d action;
  Eigen::Vector3d next;
};

/// Consecutive (s, a, s') triples of each log; the state before the first
/// record is at rest.
std::vector<Transition> extract_transitions(std::span<const TrajectoryLog> logs);

struct GatOptions {
  int k = 5;
  double max_speed = 1.5;
  double max_yaw_rate = 2.0;
  int search_evaluations = 300;
};

/// Grounded action transformation g(s, a) = f_sim^-1(s, f_real(s, a)).
class ActionTransformer {
 public:
  /// Passes every action through unchanged, apart from clamping.
  static ActionTransformer identity(double max_speed = 1.5, double max_yaw_rate = 2.0);

  bool is_identity() const { return factory_ == nullptr; }

  /// Predicted real next state: inverse-distance weighted k nearest
  /// neighbours on standardized (state, action) inputs.
  Eigen::Vector3d predict_real(const Eigen::Vector3d& state, const Eigen::Vector3d& action) const;

  /// Next state of the simulator after one control tick from `state` under
  /// `action`, with the wheels at the matching speeds and no controller history.
  Eigen::Vector3d simulate(const Eigen::Vector3d& state, const Eigen::Vector3d& action) const;

  /// Action that best reproduces `target` in the simulator; local pattern
  /// search over the command box starting from `start`.
  Eigen::Vector3d inverse(const Eigen::Vector3d& state, const Eigen::Vector3d& target,
                          const Eigen::Vector3d& start) const;

  ControlCommand transform(const Eigen::Vector3d& state, const ControlCommand& action) const;

  std::size_t training_size() const { return static_cast<std::size_t>(inputs_.rows()); }
  /// Leave-one-out error of the forward model, per output dimension (RMS).
  const Eigen::Vector3d& residual_rms() const { return residual_rms_; }
  double max_speed() const { return opts_.max_speed; }
  double max_yaw_rate() const { return opts_.max_yaw_rate; }

  friend ActionTransformer gat_fit(std::span<const TrajectoryLog>, EngineFactory, const GatOptions&);

 private:
  Eigen::Vector3d knn(const Eigen::Matrix<double, 6, 1>& query, int skip) const;
  Eigen::Vector3d clamp_action(Eigen::Vector3d a) const;

  GatOptions opts_;
  EngineFactory factory_;
  Eigen::Matrix<double, Eigen::Dynamic, 6> inputs_;  ///< standardized
  Eigen::Matrix<double, Eigen::Dynamic, 3> targets_;
  Eigen::Matrix<double, 6, 1> in_mean_ = Eigen::Matrix<double, 6, 1>::Zero();
  Eigen::Matrix<double, 6, 1> in_scale_ = Eigen::Matrix<double, 6, 1>::Ones();
  Eigen::Vector3d out_scale_ = Eigen::Vector3d::Ones();
  Eigen::Vector3d residual_rms_ = Eigen::Vector3d::Zero();
};

inline constexpr std::size_t kGatMinTransitions = 100;

/// Throws Error(kInsufficientData) with fewer than 100 transitions.
ActionTransformer gat_fit(std::span<const TrajectoryLog> real_logs, EngineFactory sim,
                          const GatOptions& opts = {});

ActionTransformer gat_fit(std::span<const TrajectoryLog> real_logs, const SimParams& sim,
                          const GatOptions& opts = {});

/// Wraps a command source so every command is grounded before it reaches
/// the simulator.
ControlCommand gat_transform(const ActionTransformer& t, const Eigen::Vector3d& state,
                             const ControlCommand& action);

}  // namespace arena
