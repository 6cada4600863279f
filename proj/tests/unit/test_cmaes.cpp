#include <doctest.h>

#include <cmath>

#include "arena/cmaes.hpp"

using namespace arena;

namespace {

double sphere(const Eigen::VectorXd& x) { return (x.array() - 0.3).square().sum(); }

double rosenbrock(const Eigen::VectorXd& x) {
  // minimum at (0.6, 0.6) inside the unit box
  const Eigen::VectorXd y = 5.0 * x.array() - 2.0;
  double f = 0.0;
  for (Eigen::Index i = 0; i + 1 < y.size(); ++i)
    f += 100.0 * std::pow(y[i + 1] - y[i] * y[i], 2) + std::pow(1.0 - y[i], 2);
  return f;
}

}  // namespace

TEST_CASE("default population") {
  CHECK(cmaes_population(1) == 4);
  CHECK(cmaes_population(3) == 7);
  CHECK(cmaes_population(9) == 10);
  CHECK(cmaes_population(16) == 12);
}

TEST_CASE("sphere converges") {
  CmaesOptions o;
  o.seed = 1;
  const auto r = cmaes_minimize(sphere, Eigen::VectorXd::Constant(4, 0.8), o);
  CHECK(r.best_f < 1e-10);
  CHECK((r.best_x.array() - 0.3).abs().maxCoeff() < 1e-4);
  CHECK(r.converged);
  CHECK(r.evaluations <= o.max_evaluations);
}

TEST_CASE("rosenbrock converges") {
  CmaesOptions o;
  o.seed = 2;
  o.max_evaluations = 6000;
  const auto r = cmaes_minimize(rosenbrock, Eigen::VectorXd::Constant(3, 0.2), o);
  CHECK(r.best_f < 1e-6);
  CHECK((r.best_x.array() - 0.6).abs().maxCoeff() < 1e-3);
}

TEST_CASE("deterministic in the seed") {
  CmaesOptions o;
  o.seed = 3;
  o.max_evaluations = 300;
  const auto a = cmaes_minimize(rosenbrock, Eigen::VectorXd::Constant(3, 0.5), o);
  const auto b = cmaes_minimize(rosenbrock, Eigen::VectorXd::Constant(3, 0.5), o);
  CHECK(a.best_x == b.best_x);
  CHECK(a.best_f == b.best_f);
  o.seed = 4;
  const auto c = cmaes_minimize(rosenbrock, Eigen::VectorXd::Constant(3, 0.5), o);
  CHECK(c.best_x != a.best_x);
}

TEST_CASE("best-so-far is non-increasing and candidates stay in the box") {
  CmaesOptions o;
  o.seed = 5;
  o.max_evaluations = 800;
  o.sigma0 = 0.8;
  bool in_box = true;
  const auto r = cmaes_minimize(
      [&](const Eigen::VectorXd& x) {
        in_box = in_box && x.minCoeff() >= 0.0 && x.maxCoeff() <= 1.0;
        // optimum on the boundary
        return (x.array() + 0.5).square().sum();
      },
      Eigen::VectorXd::Constant(5, 0.5), o);
  CHECK(in_box);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i].best <= r.history[i - 1].best);
  CHECK(r.best_x.maxCoeff() < 0.05);
}

TEST_CASE("budget and target stops") {
  CmaesOptions o;
  o.seed = 6;
  o.max_evaluations = 50;
  const auto r = cmaes_minimize(rosenbrock, Eigen::VectorXd::Constant(6, 0.1), o);
  CHECK(r.evaluations <= 50);
  CHECK_FALSE(r.converged);
  o.max_evaluations = 5000;
  o.target = 0.01;
  const auto t = cmaes_minimize(sphere, Eigen::VectorXd::Constant(2, 0.9), o);
  CHECK(t.converged);
  CHECK(t.best_f <= 0.01);
  CHECK(t.evaluations < 500);
}

TEST_CASE("batch objective sees the population in order") {
  CmaesOptions o;
  o.seed = 7;
  o.max_evaluations = 100;
  std::vector<std::size_t> sizes;
  const auto r = cmaes_minimize(
      [&](const std::vector<Eigen::VectorXd>& xs) {
        sizes.push_back(xs.size());
        std::vector<double> f;
        for (const auto& x : xs) f.push_back(sphere(x));
        return f;
      },
      Eigen::VectorXd::Constant(2, 0.9), o);
  REQUIRE(sizes.size() >= 2);
  CHECK(sizes[0] == 1);  // the start point
  CHECK(sizes[1] == static_cast<std::size_t>(cmaes_population(2)));
  CHECK(r.evaluations <= 100);
}
