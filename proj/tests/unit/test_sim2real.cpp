#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "arena/error.hpp"
#include "arena/sim2real.hpp"
#include "log_builder.hpp"

using namespace arena;
using namespace arena::testing;

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::vector<TrajectoryLog> reference_at(const SimParams& truth, int ticks = 150) {
  return {replay(command_log(random_commands(77, ticks)), truth)};
}

}  // namespace

TEST_CASE("default parameter space") {
  const ParamSpace s = default_param_space();
  CHECK_NOTHROW(validate(s));
  const std::set<std::string> names{"f_perp", "f_par", "c_t", "kp", "ki", "kd", "mass", "rho_w",
                                    "zeta_vx", "zeta_vy", "zeta_vw", "zeta_s", "sigma_l",
                                    "lambda_anom", "mu_e", "sigma_e"};
  std::set<std::string> got;
  for (const auto& b : s.bounds) {
    got.insert(b.name);
    CHECK(b.lower <= b.nominal);
    CHECK(b.nominal <= b.upper);
  }
  CHECK(got == names);
  const ParamSpace back = param_space_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(to_json(back).dump() == to_json(s).dump());
}

TEST_CASE("invalid spaces") {
  ParamSpace s = default_param_space();
  s.bounds[0].lower = 3.0;
  CHECK_THROWS_AS(validate(s), Error);
  s = default_param_space();
  s.bounds.push_back(s.bounds[0]);
  CHECK_THROWS_AS(validate(s), Error);
  s = default_param_space();
  s.bounds[0].name = "warp_drive";
  CHECK_THROWS_AS(validate(s), Error);
  std::mt19937_64 rng(1);
  ParamSpace inverted = default_param_space();
  inverted.bounds[2].lower = 0.7;
  CHECK_THROWS_AS(udr_sample(inverted, rng), Error);
}

TEST_CASE("uniform randomization") {
  const ParamSpace s = default_param_space();
  std::mt19937_64 rng(2);
  const int n = 10000;
  std::vector<std::vector<double>> draws(s.bounds.size());
  for (int k = 0; k < n; ++k) {
    const SimParams p = udr_sample(s, rng);
    for (std::size_t i = 0; i < s.bounds.size(); ++i) {
      const double v = param_field(s.bounds[i].name).get(p);
      CHECK(v >= s.bounds[i].lower);
      CHECK(v <= s.bounds[i].upper);
      draws[i].push_back(v);
    }
  }
  for (std::size_t i = 0; i < s.bounds.size(); ++i) {
    const auto& b = s.bounds[i];
    const bool integer = param_field(b.name).is_integer();
    const int bins = integer ? static_cast<int>(b.upper - b.lower) + 1 : 10;
    std::vector<int> hist(static_cast<std::size_t>(bins), 0);
    for (double v : draws[i]) {
      const int k = integer ? static_cast<int>(v - b.lower)
                            : std::min(bins - 1, static_cast<int>((v - b.lower) / (b.upper - b.lower) * bins));
      ++hist[static_cast<std::size_t>(k)];
    }
    double chi2 = 0.0;
    const double e = static_cast<double>(n) / bins;
    for (int h : hist) chi2 += (h - e) * (h - e) / e;
    // 0.99 quantiles of chi-square with 3 and 9 degrees of freedom
    CHECK_MESSAGE(chi2 < (bins == 4 ? 11.345 : 21.666), b.name);
  }
  for (std::size_t i = 0; i + 1 < draws.size(); ++i)
    CHECK(std::abs(pearson(draws[i], draws[i + 1])) < 0.05);
}

TEST_CASE("degenerate intervals and untouched fields") {
  ParamSpace s = default_param_space();
  for (auto& b : s.bounds) b.lower = b.upper = b.nominal;
  std::mt19937_64 rng(3);
  SimParams base;
  base.max_range = 9.0;
  const SimParams p = udr_sample(s, rng, base);
  for (const auto& b : s.bounds) CHECK(param_field(b.name).get(p) == b.nominal);
  CHECK(p.max_range == 9.0);
}

TEST_CASE("state discrepancy") {
  Samples ref = Samples::Random(40, 6);
  Samples sim = ref;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
  CHECK(state_discrepancy(sim, ref, ones) == 0.0);
  sim.col(3).array() += 0.1;
  CHECK(state_discrepancy(sim, ref, ones) == doctest::Approx(0.01));
  CHECK(state_discrepancy(ref, sim, ones) == doctest::Approx(0.01));
  Eigen::VectorXd scale = ones;
  scale[3] = 0.5;
  CHECK(state_discrepancy(sim, ref, scale) == doctest::Approx(0.04));
  // heading wraps around
  Samples a = Samples::Zero(2, 6), b = Samples::Zero(2, 6);
  a.col(2).setConstant(3.1);
  b.col(2).setConstant(-3.1);
  CHECK(state_discrepancy(a, b, ones) == doctest::Approx(std::pow(2 * std::numbers::pi - 6.2, 2)));
  CHECK_THROWS_AS(state_discrepancy(Samples::Zero(3, 6), ref, ones), Error);
}

TEST_CASE("replay reproduces its own reference") {
  SimParams truth;
  truth.c_t = 0.36;
  const auto refs = reference_at(truth);
  CHECK(trajectory_discrepancy(replay(refs[0], truth), refs[0]) == 0.0);
  CHECK(total_discrepancy(refs, truth) == 0.0);
  CHECK(total_discrepancy(refs, SimParams{}) > 0.0);
  std::mt19937_64 rng(4);
  const std::vector<SimParams> list{SimParams{}, truth, udr_sample(default_param_space(), rng)};
  CHECK(evaluate_discrepancies(refs, list, 1) == evaluate_discrepancies(refs, list, 3));
}

TEST_CASE("DROID fixed point and determinism") {
  const auto refs = reference_at(SimParams{}, 80);
  DroidOptions o;
  o.budget = 60;
  const CalibrationResult fixed = droid_calibrate(default_param_space(), refs, o);
  CHECK(fixed.best_discrepancy == 0.0);
  CHECK(fixed.params == SimParams{});
  CHECK(fixed.converged);

  SimParams truth;
  truth.f_perp = 0.8;
  const auto shifted = reference_at(truth, 80);
  o.names = {"f_perp", "c_t"};
  o.budget = 80;
  o.seed = 9;
  const auto a = droid_calibrate(default_param_space(), shifted, o);
  o.threads = 3;
  const auto b = droid_calibrate(default_param_space(), shifted, o);
  CHECK(a.params == b.params);
  CHECK(a.best_discrepancy == b.best_discrepancy);
  CHECK(a.evaluations <= 80);
  for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i].best <= a.history[i - 1].best);
  CHECK(a.best_discrepancy < total_discrepancy(shifted, SimParams{}));
  o.budget = 3;
  CHECK_THROWS_AS(droid_calibrate(default_param_space(), shifted, o), Error);
}

TEST_CASE("SimOpt bookkeeping") {
  const auto refs = reference_at(SimParams{}, 60);
  const std::vector<std::string> names{"c_t", "f_perp"};
  const ParamDistribution d = ParamDistribution::from_space(default_param_space(), names);
  SimOptOptions o;
  o.iterations = 0;
  const auto same = simopt_update(d, refs, o);
  CHECK(to_json(same.distribution).dump() == to_json(d).dump());
  o.samples_per_iter = 7;
  o.iterations = 1;
  CHECK_THROWS_AS(simopt_update(d, refs, o), Error);
}

TEST_CASE("SimOpt self-consistency") {
  const auto refs = reference_at(SimParams{}, 60);
  const std::vector<std::string> names{"c_t", "f_perp", "mass"};
  const ParamSpace space = default_param_space();
  const ParamDistribution d = ParamDistribution::from_space(space, names);
  SimOptOptions o;
  o.iterations = 5;
  o.samples_per_iter = 10;
  o.seed = 4;
  const auto r = simopt_update(d, refs, o);
  REQUIRE(r.history.size() == 6);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto& p = r.distribution.params[i];
    const auto& b = space.at(names[i]);
    CHECK(std::abs(p.mean - d.params[i].mean) < 0.05 * (b.upper - b.lower));
    CHECK(p.stddev <= d.params[i].stddev);
    CHECK(p.stddev >= d.params[i].stddev / 32.0);
    CHECK(p.mean >= b.lower);
    CHECK(p.mean <= b.upper);
  }
  for (std::size_t i = 1; i < r.history.size(); ++i)
    CHECK(r.history[i].mean_discrepancy <= r.history[i - 1].mean_discrepancy);
}

TEST_CASE("distribution sampling respects bounds") {
  ParamDistribution d = ParamDistribution::from_space(default_param_space(), default_calibration_names(), 2.0);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 2000; ++k) {
    const Eigen::VectorXd x = d.sample(rng);
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      CHECK(x[static_cast<Eigen::Index>(i)] >= d.params[i].lower);
      CHECK(x[static_cast<Eigen::Index>(i)] <= d.params[i].upper);
    }
  }
}
