#include "arena/gat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arena/error.hpp"

namespace arena {

std::vector<Transition> extract_transitions(std::span<const TrajectoryLog> logs) {
  std::vector<Transition> out;
  for (const auto& log : logs) {
    Eigen::Vector3d prev = Eigen::Vector3d::Zero();
    for (const auto& r : log.records) {
      const Eigen::Vector3d next(r.vel[0], r.vel[1], r.vel[2]);
      out.push_back({prev, Eigen::Vector3d(r.cmd[0], r.cmd[1], r.cmd[2]), next});
      prev = next;
    }
  }
  return out;
}

ActionTransformer ActionTransformer::identity(double max_speed, double max_yaw_rate) {
  ActionTransformer t;
  t.opts_.max_speed = max_speed;
  t.opts_.max_yaw_rate = max_yaw_rate;
  return t;
}

Eigen::Vector3d ActionTransformer::clamp_action(Eigen::Vector3d a) const {
  a[0] = std::clamp(a[0], -opts_.max_speed, opts_.max_speed);
  a[1] = std::clamp(a[1], -opts_.max_speed, opts_.max_speed);
  a[2] = std::clamp(a[2], -opts_.max_yaw_rate, opts_.max_yaw_rate);
  return a;
}

Eigen::Vector3d ActionTransformer::knn(const Eigen::Matrix<double, 6, 1>& query, int skip) const {
  const int k = std::min<int>(opts_.k, static_cast<int>(inputs_.rows()) - (skip >= 0 ? 1 : 0));
  // (squared distance, index), kept sorted ascending
  std::vector<std::pair<double, int>> best;
  best.reserve(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i < inputs_.rows(); ++i) {
    if (i == skip) continue;
    const double d2 = (inputs_.row(i).transpose() - query).squaredNorm();
    if (static_cast<int>(best.size()) == k && d2 >= best.back().first) continue;
    const auto pos = std::upper_bound(best.begin(), best.end(), std::make_pair(d2, i));
    best.insert(pos, {d2, i});
    if (static_cast<int>(best.size()) > k) best.pop_back();
  }
  if (best.front().first < 1e-24) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    int count = 0;
    for (const auto& [d2, i] : best)
      if (d2 < 1e-24) {
        sum += targets_.row(i).transpose();
        ++count;
      }
    return sum / count;
  }
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  double wsum = 0.0;
  for (const auto& [d2, i] : best) {
    const double w = 1.0 / std::sqrt(d2);
    sum += w * targets_.row(i).transpose();
    wsum += w;
  }
  return sum / wsum;
}

Eigen::Vector3d ActionTransformer::predict_real(const Eigen::Vector3d& state,
                                                const Eigen::Vector3d& action) const {
  if (is_identity()) return simulate(state, action);
  Eigen::Matrix<double, 6, 1> q;
  q << state, action;
  return knn((q - in_mean_).cwiseQuotient(in_scale_), -1);
}

Eigen::Vector3d ActionTransformer::simulate(const Eigen::Vector3d& state,
                                            const Eigen::Vector3d& action) const {
  if (is_identity()) throw Error(ErrorCode::kInvalidArgument, "identity transformer has no simulator");
  Engine engine = factory_();
  engine.reset(BodyState{0.0, 0.0, 0.0, state[0], state[1], state[2]});
  const ControlCommand cmd{action[0], action[1], action[2], false};
  engine.wheels().omega =
      inverse_kinematics(ControlCommand{state[0], state[1], state[2], false}, engine.params());
  engine.latency().prime(cmd);
  engine.step_control(cmd);
  const BodyState& b = engine.body();
  return {b.v_x, b.v_y, b.v_w};
}

Eigen::Vector3d ActionTransformer::inverse(const Eigen::Vector3d& state, const Eigen::Vector3d& target,
                                           const Eigen::Vector3d& start) const {
  const Eigen::Vector3d range(2.0 * opts_.max_speed, 2.0 * opts_.max_speed, 2.0 * opts_.max_yaw_rate);
  auto cost = [&](const Eigen::Vector3d& a) {
    return (simulate(state, a) - target).cwiseQuotient(out_scale_).squaredNorm();
  };
  Eigen::Vector3d a = clamp_action(start);
  double f = cost(a);
  int evals = 1;
  Eigen::Vector3d step = 0.1 * range;
  while (evals < opts_.search_evaluations && (step.array() > 1e-3 * range.array()).any()) {
    bool improved = false;
    for (int d = 0; d < 3 && evals < opts_.search_evaluations; ++d) {
      for (const double sign : {1.0, -1.0}) {
        Eigen::Vector3d trial = a;
        trial[d] += sign * step[d];
        trial = clamp_action(trial);
        if (trial == a) continue;
        const double ft = cost(trial);
        ++evals;
        if (ft < f) {
          f = ft;
          a = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return a;
}

ControlCommand ActionTransformer::transform(const Eigen::Vector3d& state,
                                            const ControlCommand& action) const {
  const Eigen::Vector3d a(action.u_x, action.u_y, action.u_w);
  Eigen::Vector3d out = clamp_action(a);
  if (!is_identity()) out = inverse(state, predict_real(state, a), out);
  return {out[0], out[1], out[2], action.fire};
}

ActionTransformer gat_fit(std::span<const TrajectoryLog> real_logs, EngineFactory sim,
                          const GatOptions& opts) {
  if (!sim) throw Error(ErrorCode::kInvalidArgument, "gat_fit needs a simulator");
  if (opts.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  const auto transitions = extract_transitions(real_logs);
  if (transitions.size() < kGatMinTransitions)
    throw Error(ErrorCode::kInsufficientData,
                "gat_fit needs at least " + std::to_string(kGatMinTransitions) + " transitions, got " +
                    std::to_string(transitions.size()));

  ActionTransformer t;
  t.opts_ = opts;
  t.factory_ = std::move(sim);
  const auto n = static_cast<Eigen::Index>(transitions.size());
  Eigen::Matrix<double, Eigen::Dynamic, 6> raw(n, 6);
  t.targets_.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& tr = transitions[static_cast<std::size_t>(i)];
    raw.row(i) << tr.state.transpose(), tr.action.transpose();
    t.targets_.row(i) = tr.next.transpose();
  }
  for (int d = 0; d < 6; ++d) {
    t.in_mean_[d] = raw.col(d).mean();
    const double sd = std::sqrt((raw.col(d).array() - t.in_mean_[d]).square().mean());
    t.in_scale_[d] = sd > 0.0 ? sd : 1.0;
  }
  for (int d = 0; d < 3; ++d) {
    const double m = t.targets_.col(d).mean();
    const double sd = std::sqrt((t.targets_.col(d).array() - m).square().mean());
    t.out_scale_[d] = sd > 0.0 ? sd : 1.0;
  }
  t.inputs_.resize(n, 6);
  for (Eigen::Index i = 0; i < n; ++i)
    t.inputs_.row(i) = (raw.row(i).transpose() - t.in_mean_).cwiseQuotient(t.in_scale_).transpose();

  Eigen::Vector3d sq = Eigen::Vector3d::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d pred = t.knn(t.inputs_.row(i).transpose(), static_cast<int>(i));
    sq += (pred - t.targets_.row(i).transpose()).cwiseAbs2();
  }
  t.residual_rms_ = (sq / static_cast<double>(n)).cwiseSqrt();
  return t;
}

ActionTransformer gat_fit(std::span<const TrajectoryLog> real_logs, const SimParams& sim,
                          const GatOptions& opts) {
  return gat_fit(real_logs, [sim] { return Engine(sim); }, opts);
}

ControlCommand gat_transform(const ActionTransformer& t, const Eigen::Vector3d& state,
                             const ControlCommand& action) {
  return t.transform(state, action);
}

}  // namespace arena
