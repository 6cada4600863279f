#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "arena/error.hpp"
#include "arena/transport.hpp"

using namespace arena;

namespace {

// Exhaustive minimum over all permutations.
double brute_force_w1(const Samples& x, const Samples& y) {
  std::vector<int> perm(static_cast<std::size_t>(x.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int i = 0; i < x.rows(); ++i) c += (x.row(i) - y.row(perm[static_cast<std::size_t>(i)])).norm();
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(x.rows());
}

Samples random_samples(std::mt19937_64& rng, int n, int d, double shift = 0.0) {
  std::normal_distribution<double> g(shift, 1.0);
  Samples s(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) s(i, j) = g(rng);
  return s;
}

}  // namespace

TEST_CASE("assignment matches exhaustive search") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 6;
    const Samples x = random_samples(rng, n, 3), y = random_samples(rng, n, 3, 0.5);
    CHECK(wasserstein_exact(x, y) == doctest::Approx(brute_force_w1(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("assignment returns a permutation with the reported cost") {
  Eigen::MatrixXd c(3, 3);
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const Assignment a = solve_assignment(c);
  CHECK(a.cost == doctest::Approx(5.0));
  std::vector<int> sorted = a.assignment;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2});
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += c(i, a.assignment[static_cast<std::size_t>(i)]);
  CHECK(sum == doctest::Approx(a.cost));
}

TEST_CASE("metric axioms on small sets") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Samples a = random_samples(rng, 6, 2), b = random_samples(rng, 6, 2, 0.7),
                  c = random_samples(rng, 6, 2, -0.4);
    const double ab = wasserstein_exact(a, b), ba = wasserstein_exact(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(wasserstein_exact(a, a) == doctest::Approx(0.0));
    CHECK(ab <= wasserstein_exact(a, c) + wasserstein_exact(c, b) + 1e-12);
  }
}

TEST_CASE("one-dimensional closed forms") {
  Samples zeros = Samples::Zero(4, 1), ones = Samples::Ones(4, 1);
  CHECK(wasserstein_distance(zeros, ones) == doctest::Approx(1.0));
  const int n = 1000;
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Samples x(n, 1), y(n, 1);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = u(rng);
    y(i, 0) = u(rng) + 0.5;
  }
  CHECK(std::abs(wasserstein_distance(x, y) - 0.5) <= 0.05);
  // permuting a sample set changes nothing
  Samples xr = x.colwise().reverse();
  CHECK(wasserstein_distance(x, xr) == doctest::Approx(0.0));
}

TEST_CASE("sinkhorn approaches the exact cost from above") {
  std::mt19937_64 rng(44);
  const Samples x = random_samples(rng, 60, 2), y = random_samples(rng, 60, 2, 1.0);
  const double exact = wasserstein_exact(x, y);
  const double approx = wasserstein_sinkhorn(x, y);
  CHECK(approx >= exact - 1e-6);
  CHECK(approx <= exact + 0.1);
  // unequal sizes take the entropic route
  const Samples z = random_samples(rng, 45, 2, 1.0);
  CHECK(wasserstein_distance(x, z) > 0.0);
}

TEST_CASE("too few samples") {
  const Samples one = Samples::Zero(1, 2), two = Samples::Zero(2, 2);
  try {
    wasserstein_distance(one, two);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("pooled standardization") {
  Samples x(2, 2), y(2, 2);
  x << 0, 5, 2, 5;
  y << 4, 5, 6, 5;
  standardize_pooled(x, y);
  const double mean = (x.col(0).sum() + y.col(0).sum()) / 4;
  CHECK(mean == doctest::Approx(0.0));
  const double var = (x.col(0).squaredNorm() + y.col(0).squaredNorm()) / 4;
  CHECK(var == doctest::Approx(1.0));
  CHECK(x(0, 1) == 0.0);
  CHECK(y(1, 1) == 0.0);
}
