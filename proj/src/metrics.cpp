#include "arena/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arena/error.hpp"

namespace arena {

namespace {

void require_trials(std::span<const TrajectoryLog> trials, const char* metric) {
  if (trials.empty())
    throw Error(ErrorCode::kInvalidArgument, std::string(metric) + " needs at least one trial");
}

}  // namespace

double success_rate(std::span<const TrajectoryLog> trials) {
  require_trials(trials, "success_rate");
  double sum = 0.0;
  for (const auto& t : trials) {
    if (t.header.n_goals <= 0) throw Error(ErrorCode::kInvalidArgument, "trial has no goals");
    sum += static_cast<double>(t.summary.activated) / t.header.n_goals;
  }
  return sum / static_cast<double>(trials.size());
}

double path_length(const TrajectoryLog& trial) {
  double p = 0.0;
  for (const auto& r : trial.records) p += r.delta;
  return p;
}

double spl(std::span<const TrajectoryLog> trials) {
  require_trials(trials, "spl");
  double sum = 0.0;
  for (const auto& t : trials) {
    if (!t.summary.success) continue;
    const auto l = t.header.shortest_path();
    if (!l || *l <= 0.0)
      throw Error(ErrorCode::kInvalidArgument, "successful trial lacks a shortest-path length");
    sum += *l / std::max(path_length(t), *l);
  }
  return sum / static_cast<double>(trials.size());
}

double sfpl(std::span<const TrajectoryLog> trials) {
  require_trials(trials, "sfpl");
  double sum = 0.0;
  for (const auto& t : trials) {
    double safe = 0.0, total = 0.0;
    for (const auto& r : t.records) {
      total += r.delta;
      if (!r.collision) safe += r.delta;
    }
    if (total <= 0.0) throw Error(ErrorCode::kInvalidArgument, "sfpl undefined for zero path length");
    sum += safe / total;
  }
  return sum / static_cast<double>(trials.size());
}

double avg_velocity(std::span<const TrajectoryLog> trials) {
  require_trials(trials, "avg_velocity");
  double sum = 0.0;
  for (const auto& t : trials) {
    if (t.records.empty()) continue;
    double s = 0.0;
    for (const auto& r : t.records) s += std::hypot(r.vel[0], r.vel[1]);
    sum += s / static_cast<double>(t.records.size());
  }
  return sum / static_cast<double>(trials.size());
}

int collision_count(const TrajectoryLog& trial) {
  int count = 0;
  bool prev = false;
  for (const auto& r : trial.records) {
    if (r.collision && !prev) ++count;
    prev = r.collision;
  }
  return count;
}

Samples trajectory_states(const TrajectoryLog& trial) {
  Samples s(static_cast<Eigen::Index>(trial.records.size()), 6);
  for (std::size_t i = 0; i < trial.records.size(); ++i) {
    const auto& r = trial.records[i];
    s.row(static_cast<Eigen::Index>(i)) << r.pose[0], r.pose[1], r.pose[2], r.vel[0], r.vel[1],
        r.vel[2];
  }
  return s;
}

double traj_gap(const Samples& sim, const Samples& real, const TrajGapOptions& opts) {
  if (!opts.standardize) return wasserstein_distance(sim, real);
  Samples a = sim, b = real;
  standardize_pooled(a, b);
  return wasserstein_distance(a, b);
}

namespace {

Samples stack(std::span<const TrajectoryLog> logs) {
  Eigen::Index rows = 0;
  for (const auto& l : logs) rows += static_cast<Eigen::Index>(l.records.size());
  Samples out(rows, 6);
  Eigen::Index at = 0;
  for (const auto& l : logs) {
    const Samples s = trajectory_states(l);
    out.middleRows(at, s.rows()) = s;
    at += s.rows();
  }
  return out;
}

bool paired(std::span<const TrajectoryLog> a, std::span<const TrajectoryLog> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].header.seed != b[i].header.seed || a[i].header.level != b[i].header.level) return false;
  return true;
}

}  // namespace

double traj_gap(std::span<const TrajectoryLog> sim, std::span<const TrajectoryLog> real,
                const TrajGapOptions& opts) {
  if (sim.empty() || real.empty())
    throw Error(ErrorCode::kInvalidArgument, "traj_gap needs logs on both sides");
  if (paired(sim, real)) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sim.size(); ++i)
      sum += traj_gap(trajectory_states(sim[i]), trajectory_states(real[i]), opts);
    return sum / static_cast<double>(sim.size());
  }
  return traj_gap(stack(sim), stack(real), opts);
}

CombinedTrial combined_trial(const TrajectoryLog& t) {
  CombinedTrial c;
  c.activated = t.summary.activated;
  c.confrontation_active = t.summary.confrontation_active;
  c.damage = t.summary.damage;
  c.hp = t.summary.hp;
  c.elapsed = t.summary.elapsed;
  c.collision_time = t.summary.collision_time;
  return c;
}

namespace {

double mean_score(std::span<const TrajectoryLog> logs) {
  std::vector<CombinedTrial> trials;
  trials.reserve(logs.size());
  for (const auto& l : logs) trials.push_back(combined_trial(l));
  return combined_score(trials);
}

}  // namespace

MetricsReport compute_report(std::span<const TrajectoryLog> sim, std::span<const TrajectoryLog> real) {
  require_trials(sim, "report");
  MetricsReport r;
  r.trials = sim.size();
  r.sr = success_rate(sim);
  try {
    r.spl = spl(sim);
  } catch (const Error&) {
  }
  try {
    r.sfpl = sfpl(sim);
  } catch (const Error&) {
  }
  r.velocity = avg_velocity(sim);
  double collisions = 0.0, hp = 0.0, damage = 0.0;
  for (const auto& t : sim) {
    collisions += collision_count(t);
    hp += t.summary.hp;
    damage += t.summary.damage;
  }
  const double n = static_cast<double>(sim.size());
  r.collisions = collisions / n;
  r.hp = hp / n;
  r.damage = damage / n;
  r.score = mean_score(sim);
  if (!real.empty()) {
    r.traj_gap = traj_gap(sim, real);
    r.score_real = mean_score(real);
    r.fs = final_score(r.score, *r.score_real);
  }
  return r;
}

std::vector<std::string> metric_names() {
  return {"sr", "spl", "sfpl", "velocity", "trajgap", "collisions", "hp", "damage", "score", "fs"};
}

std::string report_csv(const MetricsReport& r, const std::vector<std::string>& metrics) {
  std::ostringstream head, row;
  row.precision(10);
  auto cell = [&](const std::optional<double>& v) {
    if (v) row << *v;
  };
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const std::string& m = metrics[i];
    if (i > 0) {
      head << ',';
      row << ',';
    }
    head << m;
    if (m == "sr") cell(r.sr);
    else if (m == "spl") cell(r.spl);
    else if (m == "sfpl") cell(r.sfpl);
    else if (m == "velocity") cell(r.velocity);
    else if (m == "trajgap") cell(r.traj_gap);
    else if (m == "collisions") cell(r.collisions);
    else if (m == "hp") cell(r.hp);
    else if (m == "damage") cell(r.damage);
    else if (m == "score") cell(r.score);
    else if (m == "fs") cell(r.fs);
    else throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + m + "'");
  }
  return head.str() + "\n" + row.str() + "\n";
}

}  // namespace arena
