#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "arena/dynamics.hpp"
#include "arena/params.hpp"
#include "arena/trajectory_log.hpp"
#include "arena/transport.hpp"

namespace arena {

struct ParamBound {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  double nominal = 0.0;
};

/// Box over the randomizable simulator parameters.
struct ParamSpace {
  std::vector<ParamBound> bounds;

  const ParamBound& at(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;
};

/// The sixteen variability parameters with their sampling intervals.
ParamSpace default_param_space();

/// Throws Error(kConfig) on inverted bounds, a nominal outside its bounds,
/// duplicate names or names that are not SimParams fields.
void validate(const ParamSpace& space);

nlohmann::ordered_json to_json(const ParamSpace& space);
ParamSpace param_space_from_json(const nlohmann::json& j);

/// Independent uniform draw per parameter. Integer parameters are drawn
/// uniformly over the integers in their interval.
SimParams udr_sample(const ParamSpace& space, std::mt19937_64& rng, const SimParams& base = {});

/// Writes `values` (physical units, one per name) into a copy of `base`.
/// Integer fields are rounded.
SimParams apply_values(const SimParams& base, std::span<const std::string> names,
                       const Eigen::VectorXd& values);

/// Default calibration set: friction, motor constant, mass, wheel inertia and
/// latencies. Sensor noise stays frozen.
std::vector<std::string> default_calibration_names();

// ---------------------------------------------------------------------------
// Trajectory matching

/// (x, y, theta, v_x, v_y, v_w) per record.
Samples log_states(const TrajectoryLog& log);

/// Per-dimension standard deviation of `ref`, zeros replaced by 1.
Eigen::VectorXd reference_scale(const Samples& ref);

/// Mean over ticks of the squared distance between state vectors divided by
/// `scale`. Heading differences are wrapped. Throws on mismatched lengths.
double state_discrepancy(const Samples& sim, const Samples& ref, const Eigen::VectorXd& scale);

/// state_discrepancy with scale taken from the reference log.
double trajectory_discrepancy(const TrajectoryLog& sim, const TrajectoryLog& ref);

/// Replays the command column of `ref` through a fresh free-space engine that
/// starts at the header's initial pose. Returns the resulting states.
Samples replay_states(const TrajectoryLog& ref, const SimParams& params,
                      FrictionModel model = FrictionModel::kFull);

/// Same replay, packaged as a log with the reference's header and commands.
TrajectoryLog replay(const TrajectoryLog& ref, const SimParams& params,
                     FrictionModel model = FrictionModel::kFull);

/// Sum over reference logs of the replay discrepancy under `params`.
double total_discrepancy(std::span<const TrajectoryLog> refs, const SimParams& params);

// ---------------------------------------------------------------------------
// DROID

struct DroidOptions {
  std::vector<std::string> names = default_calibration_names();
  int budget = 2000;
  std::uint64_t seed = 0;
  double sigma0 = 0.3;
  int threads = 1;
  SimParams start;  ///< values of parameters outside `names`, and the search start
};

struct CalibrationStep {
  int iteration = 0;
  int evaluations = 0;
  double best = 0.0;
  double mean = 0.0;
};

struct CalibrationResult {
  SimParams params;
  double best_discrepancy = 0.0;
  int evaluations = 0;
  bool converged = false;
  std::vector<std::string> names;
  std::vector<CalibrationStep> history;
};

/// CMA-ES over the box-normalized `names` minimizing total_discrepancy.
/// When the budget runs out the best-so-far is returned with converged = false.
CalibrationResult droid_calibrate(const ParamSpace& space, std::span<const TrajectoryLog> refs,
                                  const DroidOptions& opts = {});

nlohmann::ordered_json to_json(const CalibrationResult& result, const DroidOptions& opts);

// ---------------------------------------------------------------------------
// SimOpt

struct ParamGaussian {
  std::string name;
  double mean = 0.0;
  double stddev = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Independent Gaussians truncated to their bounds, or the uniform box.
struct ParamDistribution {
  std::vector<ParamGaussian> params;
  bool uniform = false;

  /// Means at the nominal values, standard deviation `fraction` of each width.
  static ParamDistribution from_space(const ParamSpace& space, std::span<const std::string> names,
                                      double fraction = 0.25);

  Eigen::VectorXd means() const;
  Eigen::VectorXd stddevs() const;
  std::vector<std::string> names() const;
  /// One draw; truncation by resampling, then clamping.
  Eigen::VectorXd sample(std::mt19937_64& rng) const;
  SimParams mean_params(const SimParams& base) const;
};

nlohmann::ordered_json to_json(const ParamDistribution& dist);

struct SimOptOptions {
  int iterations = 10;
  int samples_per_iter = 20;
  double elite_fraction = 0.2;
  std::uint64_t seed = 0;
  int threads = 1;
  SimParams base;  ///< values of parameters outside the distribution
};

struct SimOptStep {
  int iteration = 0;
  double mean_discrepancy = 0.0;  ///< discrepancy at the distribution mean
  double best_sample = 0.0;
  double mean_sample = 0.0;
};

struct SimOptResult {
  ParamDistribution distribution;
  /// Entry 0 is the input distribution, then one per iteration.
  std::vector<SimOptStep> history;
  bool degenerate = false;
};

/// Cross-entropy refit to the top elite fraction with a trust region: the
/// standard deviation may shrink by at most half per iteration and never
/// grows, the mean moves at most one old standard deviation and stays within
/// bounds. A refit mean that scores worse than the current mean is rejected.
SimOptResult simopt_update(const ParamDistribution& dist, std::span<const TrajectoryLog> refs,
                           const SimOptOptions& opts = {});

nlohmann::ordered_json to_json(const SimOptResult& result, const SimOptOptions& opts);

/// Evaluates `params_list` in parallel with results in input order.
std::vector<double> evaluate_discrepancies(std::span<const TrajectoryLog> refs,
                                           const std::vector<SimParams>& params_list, int threads);

}  // namespace arena
