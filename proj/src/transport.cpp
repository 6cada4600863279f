#include "arena/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arena/error.hpp"

namespace arena {

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error(ErrorCode::kInvalidArgument, "assignment needs a square matrix");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual source
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment out;
  out.assignment.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.assignment[match[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.cost += cost(i, out.assignment[i]);
  return out;
}

Eigen::MatrixXd euclidean_costs(const Samples& x, const Samples& y) {
  Eigen::MatrixXd c(x.rows(), y.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < y.rows(); ++j) c(i, j) = (x.row(i) - y.row(j)).norm();
  return c;
}

double wasserstein_exact(const Samples& x, const Samples& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw Error(ErrorCode::kInvalidArgument, "exact transport needs equal sample counts");
  const auto n = x.rows();
  if (x.cols() == 1) {
    std::vector<double> a(x.data(), x.data() + n), b(y.data(), y.data() + n);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(n);
  }
  return solve_assignment(euclidean_costs(x, y)).cost / static_cast<double>(n);
}

namespace {

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

double wasserstein_sinkhorn(const Samples& x, const Samples& y, const SinkhornOptions& opts) {
  const Eigen::MatrixXd c = euclidean_costs(x, y);
  const auto n = c.rows(), m = c.cols();
  const double eps = opts.epsilon;
  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(m));
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n), g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd scratch_n(m), scratch_m(n);
  // anneal from the cost scale down to eps; potentials warm-start each stage
  double stage = std::max(eps, c.maxCoeff());
  for (;;) {
    stage = std::max(eps, stage);
    for (int it = 0; it < opts.max_iterations; ++it) {
      for (Eigen::Index i = 0; i < n; ++i) {
        scratch_n = (g.array() - c.row(i).transpose().array()) / stage;
        f[i] = -stage * (log_sum_exp(scratch_n) + log_b);
      }
      double err = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        scratch_m = (f.array() - c.col(j).array()) / stage;
        const double g_new = -stage * (log_sum_exp(scratch_m) + log_a);
        err = std::max(err, std::abs(g_new - g[j]));
        g[j] = g_new;
      }
      if (err < opts.tolerance) break;
    }
    if (stage == eps) break;
    stage *= 0.5;
  }
  double cost = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      cost += std::exp((f[i] + g[j] - c(i, j)) / eps + log_a + log_b) * c(i, j);
  return cost;
}

double wasserstein_distance(const Samples& x, const Samples& y) {
  if (x.rows() < 2 || y.rows() < 2)
    throw Error(ErrorCode::kInvalidArgument, "transport needs at least 2 samples per set");
  if (x.cols() != y.cols())
    throw Error(ErrorCode::kInvalidArgument, "sample sets differ in dimension");
  if (x.rows() == y.rows() && x.rows() <= kExactTransportLimit) return wasserstein_exact(x, y);
  return wasserstein_sinkhorn(x, y);
}

void standardize_pooled(Samples& x, Samples& y) {
  const double total = static_cast<double>(x.rows() + y.rows());
  for (Eigen::Index d = 0; d < x.cols(); ++d) {
    const double mean = (x.col(d).sum() + y.col(d).sum()) / total;
    const double var = ((x.col(d).array() - mean).square().sum() +
                        (y.col(d).array() - mean).square().sum()) /
                       total;
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    x.col(d) = (x.col(d).array() - mean) / sd;
    y.col(d) = (y.col(d).array() - mean) / sd;
  }
}

}  // namespace arena
