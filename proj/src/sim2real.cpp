#include "arena/sim2real.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "arena/cmaes.hpp"
#include "arena/error.hpp"

namespace arena {

using ojson = nlohmann::ordered_json;

const ParamBound& ParamSpace::at(std::string_view name) const { return bounds[index_of(name)]; }

std::size_t ParamSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < bounds.size(); ++i)
    if (bounds[i].name == name) return i;
  throw Error(ErrorCode::kConfig, "parameter '" + std::string(name) + "' not in space");
}

ParamSpace default_param_space() {
  return ParamSpace{{
      {"f_perp", 0.1, 2.0, 0.5},
      {"f_par", 0.1, 2.0, 0.5},
      {"c_t", 0.1, 0.6, 0.3},
      {"kp", 0.2, 2.0, 0.8},
      {"ki", 0.0, 0.5, 0.1},
      {"kd", 0.0, 0.05, 0.01},
      {"mass", 2.5, 4.5, 3.3},
      {"rho_w", 0.005, 0.02, 0.01},
      {"zeta_vx", 0, 3, 0},
      {"zeta_vy", 0, 3, 0},
      {"zeta_vw", 0, 3, 0},
      {"zeta_s", 0, 3, 0},
      {"sigma_l", 0.0, 0.05, 0.01},
      {"lambda_anom", 0.0, 3.0, 0.5},
      {"mu_e", -0.05, 0.05, 0.0},
      {"sigma_e", 0.0, 0.1, 0.02},
  }};
}

void validate(const ParamSpace& space) {
  std::set<std::string> seen;
  for (const auto& b : space.bounds) {
    param_field(b.name);
    if (!seen.insert(b.name).second) throw Error(ErrorCode::kConfig, "duplicate parameter " + b.name);
    if (!(b.lower <= b.upper)) throw Error(ErrorCode::kConfig, b.name + ": lower bound above upper");
    if (b.nominal < b.lower || b.nominal > b.upper)
      throw Error(ErrorCode::kConfig, b.name + ": nominal outside bounds");
  }
}

ojson to_json(const ParamSpace& space) {
  ojson j = ojson::array();
  for (const auto& b : space.bounds)
    j.push_back({{"name", b.name}, {"lower", b.lower}, {"upper", b.upper}, {"nominal", b.nominal}});
  return j;
}

ParamSpace param_space_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kConfig, "parameter space must be an array");
  ParamSpace space;
  try {
    for (const auto& e : j) {
      for (const auto& [key, _] : e.items())
        if (key != "name" && key != "lower" && key != "upper" && key != "nominal")
          throw Error(ErrorCode::kConfig, "unknown parameter space key '" + key + "'");
      space.bounds.push_back({e.at("name").get<std::string>(), e.at("lower").get<double>(),
                              e.at("upper").get<double>(), e.at("nominal").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("parameter space: ") + e.what());
  }
  validate(space);
  return space;
}

SimParams udr_sample(const ParamSpace& space, std::mt19937_64& rng, const SimParams& base) {
  validate(space);
  SimParams p = base;
  for (const auto& b : space.bounds) {
    const ParamField& f = param_field(b.name);
    if (f.is_integer()) {
      const auto lo = static_cast<long>(std::ceil(b.lower));
      const auto hi = static_cast<long>(std::floor(b.upper));
      if (lo > hi) throw Error(ErrorCode::kConfig, b.name + ": no integer in interval");
      f.set(p, static_cast<double>(std::uniform_int_distribution<long>(lo, hi)(rng)));
    } else if (b.lower == b.upper) {
      f.set(p, b.lower);
    } else {
      f.set(p, std::uniform_real_distribution<double>(b.lower, b.upper)(rng));
    }
  }
  return p;
}

SimParams apply_values(const SimParams& base, std::span<const std::string> names,
                       const Eigen::VectorXd& values) {
  if (static_cast<Eigen::Index>(names.size()) != values.size())
    throw Error(ErrorCode::kInvalidArgument, "value count does not match parameter names");
  SimParams p = base;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const ParamField& f = param_field(names[i]);
    const double v = values[static_cast<Eigen::Index>(i)];
    f.set(p, f.is_integer() ? std::max(0.0, std::round(v)) : v);
  }
  return p;
}

std::vector<std::string> default_calibration_names() {
  return {"f_perp", "f_par", "c_t", "mass", "rho_w", "zeta_vx", "zeta_vy", "zeta_vw", "zeta_s"};
}

// ---------------------------------------------------------------------------

Samples log_states(const TrajectoryLog& log) {
  Samples s(static_cast<Eigen::Index>(log.records.size()), 6);
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    s.row(static_cast<Eigen::Index>(i)) << r.pose[0], r.pose[1], r.pose[2], r.vel[0], r.vel[1],
        r.vel[2];
  }
  return s;
}

Eigen::VectorXd reference_scale(const Samples& ref) {
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(ref.cols());
  if (ref.rows() == 0) return scale;
  for (Eigen::Index d = 0; d < ref.cols(); ++d) {
    const double mean = ref.col(d).mean();
    const double var = (ref.col(d).array() - mean).square().mean();
    if (var > 0.0) scale[d] = std::sqrt(var);
  }
  return scale;
}

double state_discrepancy(const Samples& sim, const Samples& ref, const Eigen::VectorXd& scale) {
  if (sim.rows() != ref.rows() || sim.cols() != ref.cols())
    throw Error(ErrorCode::kInvalidArgument, "trajectories differ in length");
  if (ref.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "empty trajectory");
  double sum = 0.0;
  for (Eigen::Index t = 0; t < ref.rows(); ++t) {
    for (Eigen::Index d = 0; d < ref.cols(); ++d) {
      double diff = sim(t, d) - ref(t, d);
      if (d == 2) diff = wrap_angle(diff);
      diff /= scale[d];
      sum += diff * diff;
    }
  }
  return sum / static_cast<double>(ref.rows());
}

double trajectory_discrepancy(const TrajectoryLog& sim, const TrajectoryLog& ref) {
  const Samples r = log_states(ref);
  return state_discrepancy(log_states(sim), r, reference_scale(r));
}

namespace {

ControlCommand record_command(const LogRecord& r) {
  return {r.cmd[0], r.cmd[1], r.cmd[2], r.cmd[3] != 0.0};
}

}  // namespace

Samples replay_states(const TrajectoryLog& ref, const SimParams& params, FrictionModel model) {
  Engine engine(params, model);
  const Pose2& start = ref.header.initial_pose;
  engine.reset(BodyState{start.x, start.y, start.theta, 0.0, 0.0, 0.0});
  Samples s(static_cast<Eigen::Index>(ref.records.size()), 6);
  for (std::size_t i = 0; i < ref.records.size(); ++i) {
    engine.step_control(record_command(ref.records[i]));
    const BodyState& b = engine.body();
    s.row(static_cast<Eigen::Index>(i)) << b.x, b.y, b.theta, b.v_x, b.v_y, b.v_w;
  }
  return s;
}

TrajectoryLog replay(const TrajectoryLog& ref, const SimParams& params, FrictionModel model) {
  const Samples s = replay_states(ref, params, model);
  TrajectoryLog out;
  out.header = ref.header;
  out.header.params = params;
  out.header.params_hash = params_hash(params);
  double px = ref.header.initial_pose.x, py = ref.header.initial_pose.y;
  for (std::size_t i = 0; i < ref.records.size(); ++i) {
    const auto row = s.row(static_cast<Eigen::Index>(i));
    LogRecord r;
    r.t = ref.records[i].t;
    r.pose = {row[0], row[1], row[2]};
    r.vel = {row[3], row[4], row[5]};
    r.odom = r.pose;
    r.cmd = ref.records[i].cmd;
    r.delta = std::hypot(row[0] - px, row[1] - py);
    px = row[0];
    py = row[1];
    out.records.push_back(r);
  }
  out.summary.elapsed = ref.records.empty() ? 0.0 : ref.records.back().t;
  return out;
}

namespace {

struct Reference {
  const TrajectoryLog* log;
  Samples states;
  Eigen::VectorXd scale;
};

std::vector<Reference> prepare(std::span<const TrajectoryLog> refs) {
  if (refs.empty()) throw Error(ErrorCode::kInvalidArgument, "no reference logs");
  std::vector<Reference> out;
  for (const auto& r : refs) {
    if (r.records.empty()) throw Error(ErrorCode::kInvalidArgument, "reference log has no records");
    Samples s = log_states(r);
    Eigen::VectorXd scale = reference_scale(s);
    out.push_back({&r, std::move(s), std::move(scale)});
  }
  return out;
}

double discrepancy_of(const std::vector<Reference>& refs, const SimParams& params) {
  double sum = 0.0;
  for (const auto& r : refs) sum += state_discrepancy(replay_states(*r.log, params), r.states, r.scale);
  return sum;
}

std::vector<double> evaluate_all(const std::vector<Reference>& refs,
                                  const std::vector<SimParams>& params_list, int threads) {
  std::vector<double> out(params_list.size());
  const int workers = std::clamp(threads, 1, std::max(1, static_cast<int>(params_list.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < params_list.size(); ++i) out[i] = discrepancy_of(refs, params_list[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < params_list.size(); i = next++)
          out[i] = discrepancy_of(refs, params_list[i]);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

double total_discrepancy(std::span<const TrajectoryLog> refs, const SimParams& params) {
  return discrepancy_of(prepare(refs), params);
}

std::vector<double> evaluate_discrepancies(std::span<const TrajectoryLog> refs,
                                           const std::vector<SimParams>& params_list, int threads) {
  return evaluate_all(prepare(refs), params_list, threads);
}

// ---------------------------------------------------------------------------

CalibrationResult droid_calibrate(const ParamSpace& space, std::span<const TrajectoryLog> refs,
                                  const DroidOptions& opts) {
  validate(space);
  if (opts.names.empty()) throw Error(ErrorCode::kInvalidArgument, "no parameters to calibrate");
  const int n = static_cast<int>(opts.names.size());
  if (opts.budget < cmaes_population(n) + 1)
    throw Error(ErrorCode::kInvalidArgument, "budget smaller than one CMA-ES generation");
  const auto references = prepare(refs);

  Eigen::VectorXd lower(n), width(n), x0(n);
  for (int i = 0; i < n; ++i) {
    const ParamBound& b = space.at(opts.names[static_cast<std::size_t>(i)]);
    lower[i] = b.lower;
    width[i] = b.upper - b.lower;
    const double start = param_field(b.name).get(opts.start);
    x0[i] = width[i] > 0.0 ? std::clamp((start - b.lower) / width[i], 0.0, 1.0) : 0.0;
  }
  auto to_params = [&](const Eigen::VectorXd& x) {
    return apply_values(opts.start, opts.names, lower + width.cwiseProduct(x));
  };

  const BatchObjective objective = [&](const std::vector<Eigen::VectorXd>& xs) {
    std::vector<SimParams> candidates;
    candidates.reserve(xs.size());
    for (const auto& x : xs) candidates.push_back(to_params(x));
    return evaluate_all(references, candidates, opts.threads);
  };

  CmaesOptions copts;
  copts.sigma0 = opts.sigma0;
  copts.max_evaluations = opts.budget;
  copts.seed = opts.seed;
  copts.target = 0.0;
  const CmaesResult r = cmaes_minimize(objective, x0, copts);

  CalibrationResult out;
  out.params = to_params(r.best_x);
  out.best_discrepancy = r.best_f;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  out.names = opts.names;
  for (std::size_t g = 0; g < r.history.size(); ++g)
    out.history.push_back({static_cast<int>(g), r.history[g].evaluations, r.history[g].best,
                           r.history[g].mean});
  return out;
}

ojson to_json(const CalibrationResult& result, const DroidOptions& opts) {
  ojson j;
  j["method"] = "droid";
  j["tool_version"] = kToolVersion;
  j["seed"] = opts.seed;
  j["budget"] = opts.budget;
  j["evaluations"] = result.evaluations;
  j["converged"] = result.converged;
  j["names"] = result.names;
  j["best_discrepancy"] = result.best_discrepancy;
  j["params_hash"] = params_hash(result.params);
  j["params"] = to_json(result.params);
  ojson history = ojson::array();
  for (const auto& h : result.history)
    history.push_back(
        {{"iteration", h.iteration}, {"evaluations", h.evaluations}, {"best", h.best}, {"mean", h.mean}});
  j["history"] = std::move(history);
  return j;
}

// ---------------------------------------------------------------------------

ParamDistribution ParamDistribution::from_space(const ParamSpace& space,
                                                std::span<const std::string> names,
                                                double fraction) {
  ParamDistribution d;
  for (const auto& name : names) {
    const ParamBound& b = space.at(name);
    d.params.push_back({b.name, b.nominal, fraction * (b.upper - b.lower), b.lower, b.upper});
  }
  return d;
}

Eigen::VectorXd ParamDistribution::means() const {
  Eigen::VectorXd m(static_cast<Eigen::Index>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) m[static_cast<Eigen::Index>(i)] = params[i].mean;
  return m;
}

Eigen::VectorXd ParamDistribution::stddevs() const {
  Eigen::VectorXd s(static_cast<Eigen::Index>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) s[static_cast<Eigen::Index>(i)] = params[i].stddev;
  return s;
}

std::vector<std::string> ParamDistribution::names() const {
  std::vector<std::string> out;
  for (const auto& p : params) out.push_back(p.name);
  return out;
}

Eigen::VectorXd ParamDistribution::sample(std::mt19937_64& rng) const {
  constexpr int kMaxResamples = 100;
  Eigen::VectorXd x(static_cast<Eigen::Index>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    double v = p.mean;
    if (uniform) {
      v = p.lower == p.upper ? p.lower : std::uniform_real_distribution<double>(p.lower, p.upper)(rng);
    } else if (p.stddev > 0.0) {
      std::normal_distribution<double> normal(p.mean, p.stddev);
      for (int k = 0; k < kMaxResamples; ++k) {
        v = normal(rng);
        if (v >= p.lower && v <= p.upper) break;
      }
      v = std::clamp(v, p.lower, p.upper);
    }
    x[static_cast<Eigen::Index>(i)] = v;
  }
  return x;
}

SimParams ParamDistribution::mean_params(const SimParams& base) const {
  return apply_values(base, names(), means());
}

ojson to_json(const ParamDistribution& dist) {
  ojson j = ojson::array();
  for (const auto& p : dist.params)
    j.push_back({{"name", p.name},
                 {"mean", p.mean},
                 {"std", p.stddev},
                 {"lower", p.lower},
                 {"upper", p.upper}});
  return j;
}

SimOptResult simopt_update(const ParamDistribution& dist, std::span<const TrajectoryLog> refs,
                           const SimOptOptions& opts) {
  if (opts.samples_per_iter < 8)
    throw Error(ErrorCode::kInvalidArgument, "simopt needs at least 8 samples per iteration");
  if (opts.iterations < 0) throw Error(ErrorCode::kInvalidArgument, "negative iteration count");
  SimOptResult out;
  out.distribution = dist;
  if (opts.iterations == 0) return out;

  const auto references = prepare(refs);
  const auto names = dist.names();
  const auto n = static_cast<Eigen::Index>(names.size());
  std::mt19937_64 rng(opts.seed);

  auto params_of = [&](const Eigen::VectorXd& v) { return apply_values(opts.base, names, v); };
  double current = discrepancy_of(references, params_of(dist.means()));
  out.history.push_back({0, current, current, current});

  const int n_elite = std::max(
      2, static_cast<int>(std::ceil(opts.elite_fraction * opts.samples_per_iter)));
  ParamDistribution d = dist;
  for (int it = 1; it <= opts.iterations; ++it) {
    std::vector<Eigen::VectorXd> xs;
    std::vector<SimParams> candidates;
    for (int k = 0; k < opts.samples_per_iter; ++k) {
      xs.push_back(d.sample(rng));
      candidates.push_back(params_of(xs.back()));
    }
    const std::vector<double> scores = evaluate_all(references, candidates, opts.threads);
    const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    if (*lo == *hi) {
      out.degenerate = true;
      out.distribution = dist;
      return out;
    }
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });

    Eigen::VectorXd elite_mean = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < n_elite; ++e) elite_mean += xs[order[e]];
    elite_mean /= n_elite;
    Eigen::VectorXd elite_var = Eigen::VectorXd::Zero(n);
    for (int e = 0; e < n_elite; ++e) elite_var += (xs[order[e]] - elite_mean).cwiseAbs2();
    elite_var /= n_elite;

    ParamDistribution next = d;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& p = next.params[static_cast<std::size_t>(i)];
      const double old_std = p.stddev;
      const double shift = std::clamp(elite_mean[i] - p.mean, -old_std, old_std);
      p.mean = std::clamp(p.mean + shift, p.lower, p.upper);
      p.stddev = std::clamp(std::sqrt(elite_var[i]), 0.5 * old_std, old_std);
    }
    const double candidate = discrepancy_of(references, params_of(next.means()));
    if (candidate > current) {
      for (std::size_t i = 0; i < next.params.size(); ++i) next.params[i].mean = d.params[i].mean;
    } else {
      current = candidate;
    }
    d = std::move(next);
    const double mean_score = std::accumulate(scores.begin(), scores.end(), 0.0) /
                              static_cast<double>(scores.size());
    out.history.push_back({it, current, *lo, mean_score});
  }
  out.distribution = std::move(d);
  return out;
}

ojson to_json(const SimOptResult& result, const SimOptOptions& opts) {
  ojson j;
  j["method"] = "simopt";
  j["tool_version"] = kToolVersion;
  j["seed"] = opts.seed;
  j["iterations"] = opts.iterations;
  j["samples_per_iter"] = opts.samples_per_iter;
  j["budget"] = opts.iterations * (opts.samples_per_iter + 1) + 1;
  j["degenerate"] = result.degenerate;
  j["distribution"] = to_json(result.distribution);
  const SimParams mean = result.distribution.mean_params(opts.base);
  j["params_hash"] = params_hash(mean);
  j["params"] = to_json(mean);
  ojson history = ojson::array();
  for (const auto& h : result.history)
    history.push_back({{"iteration", h.iteration},
                       {"mean_discrepancy", h.mean_discrepancy},
                       {"best", h.best_sample},
                       {"mean", h.mean_sample}});
  j["history"] = std::move(history);
  return j;
}

}  // namespace arena
