#pragma once

#include <vector>

#include <Eigen/Core>

namespace arena {

/// Sample sets are row-major point clouds: one sample per row.
using Samples = Eigen::MatrixXd;

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials). `assignment[i]` is the column matched to row i.
struct Assignment {
  double cost = 0.0;
  std::vector<int> assignment;
};

Assignment solve_assignment(const Eigen::MatrixXd& cost);

/// Pairwise Euclidean distances between the rows of x and y.
Eigen::MatrixXd euclidean_costs(const Samples& x, const Samples& y);

/// Exact empirical W1 between equally sized sets (uniform weights).
/// One-dimensional inputs use the sorted matching.
double wasserstein_exact(const Samples& x, const Samples& y);

struct SinkhornOptions {
  double epsilon = 0.01;
  int max_iterations = 2000;
  double tolerance = 1e-7;
};

/// Entropic-regularized transport cost <P, C> in the log domain. Biased
/// upward relative to exact W1 by O(epsilon log n).
double wasserstein_sinkhorn(const Samples& x, const Samples& y, const SinkhornOptions& opts = {});

inline constexpr int kExactTransportLimit = 2000;

/// Exact when sizes match and are at most 2000, otherwise Sinkhorn.
/// Throws Error(kInvalidArgument) with fewer than 2 samples on a side.
double wasserstein_distance(const Samples& x, const Samples& y);

/// Per-dimension z-scoring with the mean and standard deviation of the
/// concatenated sets. Zero-variance dimensions are only centred.
void standardize_pooled(Samples& x, Samples& y);

}  // namespace arena
