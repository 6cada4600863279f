#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace arena {

/// Scores a batch of candidates; result i belongs to candidate i.
using BatchObjective = std::function<std::vector<double>(const std::vector<Eigen::VectorXd>&)>;

struct CmaesOptions {
  double sigma0 = 0.3;
  int population = 0;  ///< 0 selects 4 + floor(3 ln n)
  int max_evaluations = 2000;
  std::uint64_t seed = 0;
  double tol_fun = 1e-12;
  double tol_x = 1e-8;
  /// Stop as soon as the best value reaches this.
  double target = -std::numeric_limits<double>::infinity();
};

struct CmaesGeneration {
  int evaluations = 0;
  double best = 0.0;  ///< best so far
  double mean = 0.0;  ///< mean score of this generation
  double sigma = 0.0;
};

struct CmaesResult {
  Eigen::VectorXd best_x;
  double best_f = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  bool converged = false;
  std::vector<CmaesGeneration> history;
};

/// Default population size 4 + floor(3 ln n).
int cmaes_population(int dimension);

/// (mu/mu_w, lambda)-CMA-ES on the unit box [0, 1]^n. Candidates outside the
/// box are resampled. Deterministic in the seed; the objective sees batches
/// in a fixed order.
CmaesResult cmaes_minimize(const BatchObjective& objective, const Eigen::VectorXd& x0,
                           const CmaesOptions& opts = {});

/// Serial convenience wrapper.
CmaesResult cmaes_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                           const Eigen::VectorXd& x0, const CmaesOptions& opts = {});

}  // namespace arena
