#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arena/referee.hpp"
#include "arena/trajectory_log.hpp"
#include "arena/transport.hpp"

namespace arena {

/// Mean fraction of goals activated per trial.
double success_rate(std::span<const TrajectoryLog> trials);

/// Success weighted by normalized path length: S l / max(p, l).
double spl(std::span<const TrajectoryLog> trials);

/// Collision-free fraction of the travelled path, averaged over trials.
double sfpl(std::span<const TrajectoryLog> trials);

/// Mean over trials of the per-trial mean planar speed.
double avg_velocity(std::span<const TrajectoryLog> trials);

/// Rising edges of the collision flag.
int collision_count(const TrajectoryLog& trial);

/// Travelled path length p (sum of step displacements).
double path_length(const TrajectoryLog& trial);

/// (x, y, theta, v_x, v_y, v_w) per record.
Samples trajectory_states(const TrajectoryLog& trial);

struct TrajGapOptions {
  bool standardize = true;
};

/// W1 between two state sample sets, optionally z-scored with pooled statistics.
double traj_gap(const Samples& sim, const Samples& real, const TrajGapOptions& opts = {});

/// Mean per-pair W1 when the sets pair up one-to-one (same count, same seeds),
/// otherwise W1 between the pooled state sets.
double traj_gap(std::span<const TrajectoryLog> sim, std::span<const TrajectoryLog> real,
                const TrajGapOptions& opts = {});

CombinedTrial combined_trial(const TrajectoryLog& trial);

struct MetricsReport {
  std::size_t trials = 0;
  double sr = 0.0;
  std::optional<double> spl;
  std::optional<double> sfpl;
  double velocity = 0.0;
  std::optional<double> traj_gap;
  double collisions = 0.0;
  double hp = 0.0;
  double damage = 0.0;
  double score = 0.0;
  std::optional<double> score_real;
  std::optional<double> fs;
};

/// Every metric the logs support. SPL is omitted when a successful trial has
/// no reference length, SFPL when a trial has zero path length.
MetricsReport compute_report(std::span<const TrajectoryLog> sim,
                             std::span<const TrajectoryLog> real = {});

/// Names accepted by report_csv().
std::vector<std::string> metric_names();

/// Header and value rows for the selected metrics, comma separated.
std::string report_csv(const MetricsReport& report, const std::vector<std::string>& metrics);

}  // namespace arena
