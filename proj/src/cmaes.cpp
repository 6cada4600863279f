#include "arena/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "arena/error.hpp"

namespace arena {

int cmaes_population(int dimension) {
  return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dimension))));
}

namespace {

constexpr int kMaxResamples = 100;

bool in_unit_box(const Eigen::VectorXd& x) {
  return (x.array() >= 0.0).all() && (x.array() <= 1.0).all();
}

}  // namespace

CmaesResult cmaes_minimize(const BatchObjective& objective, const Eigen::VectorXd& x0,
                           const CmaesOptions& opts) {
  const int n = static_cast<int>(x0.size());
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "cmaes needs at least one dimension");
  if (!in_unit_box(x0)) throw Error(ErrorCode::kInvalidArgument, "cmaes start outside the unit box");
  if (opts.sigma0 <= 0.0) throw Error(ErrorCode::kInvalidArgument, "cmaes sigma0 must be positive");
  const int lambda = opts.population > 0 ? opts.population : cmaes_population(n);
  if (lambda < 2) throw Error(ErrorCode::kInvalidArgument, "cmaes population must be at least 2");
  const int mu = lambda / 2;

  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double dn = n;
  const double c_sigma = (mu_eff + 2.0) / (dn + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (dn + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / dn) / (dn + 4.0 + 2.0 * mu_eff / dn);
  const double c_1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mu_eff);
  const double c_mu =
      std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((dn + 2.0) * (dn + 2.0) + mu_eff));
  const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;

  Eigen::VectorXd mean = x0;
  double sigma = opts.sigma0;
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd D = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd p_sigma = Eigen::VectorXd::Zero(n), p_c = Eigen::VectorXd::Zero(n);

  CmaesResult result;
  result.best_x = x0;

  // Score the start point so the best-so-far never exceeds it.
  {
    const auto f = objective({x0});
    result.evaluations = 1;
    result.best_f = f.at(0);
  }

  std::vector<Eigen::VectorXd> xs(lambda), ys(lambda);
  for (int generation = 0; result.evaluations + lambda <= opts.max_evaluations; ++generation) {
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(n), y(n), x(n);
      for (int attempt = 0;; ++attempt) {
        for (int i = 0; i < n; ++i) z[i] = normal(rng);
        y = B * (D.asDiagonal() * z);
        x = mean + sigma * y;
        if (in_unit_box(x)) break;
        if (attempt + 1 >= kMaxResamples) {
          x = x.cwiseMax(0.0).cwiseMin(1.0);
          y = (x - mean) / sigma;
          break;
        }
      }
      xs[k] = x;
      ys[k] = y;
    }
    const std::vector<double> f = objective(xs);
    if (static_cast<int>(f.size()) != lambda)
      throw Error(ErrorCode::kInvalidArgument, "objective returned the wrong batch size");
    result.evaluations += lambda;

    std::vector<int> order(lambda);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return f[a] < f[b]; });
    if (f[order[0]] < result.best_f) {
      result.best_f = f[order[0]];
      result.best_x = xs[order[0]];
    }

    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys[order[i]];
    mean += sigma * y_w;

    // C^{-1/2} y_w = B D^{-1} B^T y_w
    const Eigen::VectorXd c_inv_sqrt_y = B * (D.cwiseInverse().asDiagonal() * (B.transpose() * y_w));
    p_sigma = (1.0 - c_sigma) * p_sigma + std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * c_inv_sqrt_y;
    const double ps_norm = p_sigma.norm();
    const bool h_sigma =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (generation + 1))) <
        (1.4 + 2.0 / (dn + 1.0)) * chi_n;
    p_c = (1.0 - c_c) * p_c + (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) rank_mu += weights[i] * ys[order[i]] * ys[order[i]].transpose();
    const double delta_h = h_sigma ? 0.0 : c_c * (2.0 - c_c);
    C = (1.0 - c_1 - c_mu) * C + c_1 * (p_c * p_c.transpose() + delta_h * C) + c_mu * rank_mu;
    C = 0.5 * (C + C.transpose());
    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    B = eig.eigenvectors();
    D = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();

    const double gen_mean = std::accumulate(f.begin(), f.end(), 0.0) / lambda;
    result.history.push_back({result.evaluations, result.best_f, gen_mean, sigma});

    const double spread = f[order[lambda - 1]] - f[order[0]];
    if (result.best_f <= opts.target || sigma * D.maxCoeff() < opts.tol_x ||
        (spread < opts.tol_fun && generation > 0)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

CmaesResult cmaes_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                           const Eigen::VectorXd& x0, const CmaesOptions& opts) {
  const BatchObjective batch = [&](const std::vector<Eigen::VectorXd>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(objective(x));
    return out;
  };
  return cmaes_minimize(batch, x0, opts);
}

}  // namespace arena
