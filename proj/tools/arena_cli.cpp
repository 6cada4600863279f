// Command-line front end: run episodes, evaluate logs, calibrate, randomize,
// generate layouts and aggregate reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "arena/episode.hpp"
#include "arena/error.hpp"
#include "arena/metrics.hpp"
#include "arena/random.hpp"
#include "arena/sim2real.hpp"
#include "arena/trajectory_log.hpp"
#include "arena/world.hpp"

namespace fs = std::filesystem;
using arena::Error;
using arena::ErrorCode;

namespace {

enum Exit {
  kOk = 0,
  kOther = 1,
  kUsage = 2,
  kIo = 3,
  kMalformed = 4,
  kLayout = 5,
  kVersion = 6,
  kData = 7,
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return kOther;
    case ErrorCode::kConfig: return kMalformed;
    case ErrorCode::kIo: return kIo;
    case ErrorCode::kMalformedLog: return kMalformed;
    case ErrorCode::kLayoutGeneration: return kLayout;
    case ErrorCode::kUnreachable: return kLayout;
    case ErrorCode::kVersionMismatch: return kVersion;
    case ErrorCode::kInsufficientData: return kData;
  }
  return kOther;
}

void error_line(const std::string& code, const std::string& message) {
  std::cerr << nlohmann::ordered_json{{"error", code}, {"message", message}}.dump() << '\n';
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

/// All logs must come from one tool version unless forced.
void check_versions(const std::vector<arena::TrajectoryLog>& logs, bool force) {
  if (force || logs.empty()) return;
  for (const auto& l : logs)
    if (l.header.tool_version != logs.front().header.tool_version)
      throw Error(ErrorCode::kVersionMismatch, "logs mix tool versions " +
                                                   logs.front().header.tool_version + " and " +
                                                   l.header.tool_version + " (use --force)");
}

std::vector<arena::TrajectoryLog> load_logs(const std::string& dir) {
  auto logs = arena::load_log_dir(dir);
  if (logs.empty()) throw Error(ErrorCode::kIo, "no .ndjson logs in " + dir);
  return logs;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string config;
  std::string task;
  int level = 0;
  std::uint64_t seed = 0;
  double speed = 0.0;
  double time_limit = 0.0;
  std::string params_source;
  std::string params_file;
  std::string policy;
  std::string commands;
  double gamma = 0.0;
  int episodes = 1;
  int threads = 1;
  std::string out;
};

int cmd_run(const RunArgs& a, const CLI::App& app) {
  arena::EpisodeConfig cfg = a.config.empty() ? arena::EpisodeConfig{} : arena::load_episode_config(a.config);
  if (app.count("--task")) cfg.task = a.task;
  if (app.count("--level")) cfg.level = a.level;
  if (app.count("--seed")) cfg.seed = a.seed;
  if (app.count("--speed")) cfg.max_speed = a.speed;
  if (app.count("--time-limit")) cfg.time_limit = a.time_limit;
  if (app.count("--params-source")) cfg.params_source = a.params_source;
  if (app.count("--params-file")) {
    cfg.params_file = a.params_file;
    if (!app.count("--params-source") && cfg.params_source == "defaults") cfg.params_source = "file";
  }
  if (app.count("--policy")) cfg.policy = a.policy;
  if (app.count("--commands")) {
    cfg.commands_file = a.commands;
    if (!app.count("--policy")) cfg.policy = "external";
  }
  if (app.count("--gamma")) cfg.gamma = a.gamma;
  arena::validate(cfg);
  const auto paths = arena::run_batch(cfg, a.episodes, a.threads, a.out);
  for (const auto& p : paths) std::cout << p << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_eval(const std::string& logs_dir, const std::string& real_dir, const std::string& metrics,
             const std::string& out, bool force) {
  const auto sim = load_logs(logs_dir);
  std::vector<arena::TrajectoryLog> real;
  if (!real_dir.empty()) real = load_logs(real_dir);
  std::vector<arena::TrajectoryLog> all = sim;
  all.insert(all.end(), real.begin(), real.end());
  check_versions(all, force);

  std::vector<std::string> columns = metrics.empty() ? arena::metric_names() : split(metrics, ',');
  const auto known = arena::metric_names();
  for (const auto& c : columns)
    if (std::find(known.begin(), known.end(), c) == known.end())
      throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + c + "'");
  const auto report = arena::compute_report(sim, real);
  write_text(out, arena::report_csv(report, columns));
  return kOk;
}

// ---------------------------------------------------------------------------

struct CalibrateArgs {
  std::string method = "droid";
  std::string ref;
  int budget = 2000;
  int iterations = 10;
  int samples = 20;
  std::uint64_t seed = 0;
  std::string names;
  int threads = 1;
  std::string out = ".";
  bool force = false;
};

int cmd_calibrate(const CalibrateArgs& a) {
  const auto refs = load_logs(a.ref);
  check_versions(refs, a.force);
  const arena::ParamSpace space = arena::default_param_space();
  std::vector<std::string> names =
      a.names.empty() ? arena::default_calibration_names() : split(a.names, ',');
  for (const auto& n : names) space.at(n);
  fs::create_directories(a.out);
  const std::string report_path = (fs::path(a.out) / "calibration_report.json").string();
  const std::string params_path = (fs::path(a.out) / "calibrated_params.json").string();
  if (a.method == "droid") {
    arena::DroidOptions opts;
    opts.names = names;
    opts.budget = a.budget;
    opts.seed = a.seed;
    opts.threads = a.threads;
    const auto r = arena::droid_calibrate(space, refs, opts);
    write_json(report_path, arena::to_json(r, opts));
    arena::save_params(params_path, r.params);
  } else if (a.method == "simopt") {
    arena::SimOptOptions opts;
    opts.iterations = a.iterations;
    opts.samples_per_iter = a.samples;
    opts.seed = a.seed;
    opts.threads = a.threads;
    const auto dist = arena::ParamDistribution::from_space(space, names);
    const auto r = arena::simopt_update(dist, refs, opts);
    if (r.degenerate) error_line("warning", "degenerate elite set; distribution unchanged");
    write_json(report_path, arena::to_json(r, opts));
    arena::save_params(params_path, r.distribution.mean_params(opts.base));
  } else {
    throw Error(ErrorCode::kInvalidArgument, "method must be droid or simopt");
  }
  std::cout << report_path << '\n' << params_path << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_randomize(int count, std::uint64_t seed, const std::string& out, const std::string& space_file) {
  arena::ParamSpace space = arena::default_param_space();
  if (!space_file.empty()) {
    std::ifstream in(space_file);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + space_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kConfig, space_file + ": " + e.what());
    }
    space = arena::param_space_from_json(j);
  }
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "count must be positive");
  fs::create_directories(out);
  for (int i = 0; i < count; ++i) {
    std::mt19937_64 rng(arena::derive_seed(seed, static_cast<std::uint64_t>(i)));
    const arena::SimParams p = arena::udr_sample(space, rng);
    char name[32];
    std::snprintf(name, sizeof name, "params_%04d.json", i);
    const std::string path = (fs::path(out) / name).string();
    arena::save_params(path, p);
    std::cout << path << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_layout(int level, std::uint64_t seed, const std::string& out, const std::string& inspect) {
  if (!inspect.empty()) {
    const arena::ArenaLayout l = arena::load_layout(inspect);
    nlohmann::ordered_json j;
    j["layout_hash"] = arena::layout_hash(l);
    j["obstacles"] = l.obstacles.size();
    nlohmann::ordered_json goals = nlohmann::ordered_json::array();
    for (const auto& g : l.goals)
      goals.push_back({{"label", std::string(1, g.label)},
                       {"x", g.position.x()},
                       {"y", g.position.y()},
                       {"in_zone", arena::goal_inside_zone(g, l)}});
    j["goals"] = std::move(goals);
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  const arena::ArenaLayout l = arena::generate_layout(arena::level_spec(level), seed);
  nlohmann::ordered_json j = arena::to_json(l);
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    arena::save_layout(out, l);
    std::cout << out << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

void tidy_rows(std::ostream& os, const std::string& method, const std::vector<arena::TrajectoryLog>& logs,
               const std::vector<arena::TrajectoryLog>& real) {
  // Group by (level, speed) to mirror the evaluation tables.
  std::map<std::pair<int, double>, std::vector<arena::TrajectoryLog>> groups, real_groups;
  for (const auto& l : logs) groups[{l.header.level, l.header.max_speed}].push_back(l);
  for (const auto& l : real) real_groups[{l.header.level, l.header.max_speed}].push_back(l);
  for (const auto& [key, group] : groups) {
    const auto it = real_groups.find(key);
    const auto r = arena::compute_report(
        group, it == real_groups.end() ? std::span<const arena::TrajectoryLog>{}
                                       : std::span<const arena::TrajectoryLog>(it->second));
    auto row = [&](const char* metric, std::optional<double> v) {
      if (!v) return;
      os << metric << ',' << method << ',' << key.first << ',' << key.second << ',' << *v << '\n';
    };
    row("sr", r.sr);
    row("spl", r.spl);
    row("sfpl", r.sfpl);
    row("velocity", r.velocity);
    row("trajgap", r.traj_gap);
    row("collisions", r.collisions);
    row("hp", r.hp);
    row("damage", r.damage);
    row("score", r.score);
    row("fs", r.fs);
  }
}

int cmd_report(const std::vector<std::string>& inputs, const std::vector<std::string>& real_inputs,
               const std::vector<std::string>& calibrations, const std::string& out, bool force) {
  std::map<std::string, std::string> real_dirs;
  for (const auto& arg : real_inputs) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--real expects method=dir");
    real_dirs[arg.substr(0, eq)] = arg.substr(eq + 1);
  }
  std::ostringstream os;
  os.precision(10);
  os << "metric,method,level,speed,value\n";
  for (const auto& arg : inputs) {
    const auto eq = arg.find('=');
    const std::string method = eq == std::string::npos ? fs::path(arg).filename().string() : arg.substr(0, eq);
    const std::string dir = eq == std::string::npos ? arg : arg.substr(eq + 1);
    const auto logs = load_logs(dir);
    std::vector<arena::TrajectoryLog> real;
    if (const auto it = real_dirs.find(method); it != real_dirs.end()) real = load_logs(it->second);
    std::vector<arena::TrajectoryLog> all = logs;
    all.insert(all.end(), real.begin(), real.end());
    check_versions(all, force);
    tidy_rows(os, method, logs, real);
  }
  for (const auto& path : calibrations) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
      const std::string method = j.at("method").get<std::string>();
      for (const auto& h : j.at("history")) {
        const double v = h.contains("mean_discrepancy") ? h.at("mean_discrepancy").get<double>()
                                                         : h.at("best").get<double>();
        os << "discrepancy@" << h.at("iteration").get<int>() << ',' << method << ",,," << v << '\n';
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kConfig, path + ": " + e.what());
    }
  }
  write_text(out, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Headless mecanum-robot arena simulator and evaluation tool"};
  app.set_version_flag("--version", std::string(arena::kToolVersion));
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run episodes and write trajectory logs");
  run_cmd->add_option("--config", run.config, "Episode config file (JSON)");
  run_cmd->add_option("--task", run.task, "nav, combat or combined");
  run_cmd->add_option("--level", run.level, "Difficulty level 1..3");
  run_cmd->add_option("--seed", run.seed, "Base seed");
  run_cmd->add_option("--speed", run.speed, "Max speed preset 0.5, 1.0 or 1.5 m/s");
  run_cmd->add_option("--time-limit", run.time_limit, "Episode limit in seconds");
  run_cmd->add_option("--params-source", run.params_source, "defaults, file, udr or calibrated");
  run_cmd->add_option("--params-file", run.params_file, "Parameter file or calibration report");
  run_cmd->add_option("--policy", run.policy, "scripted-nav, scripted-combat or external");
  run_cmd->add_option("--commands", run.commands, "Command list for the external policy");
  run_cmd->add_option("--gamma", run.gamma, "Discount factor recorded in the header");
  run_cmd->add_option("--episodes", run.episodes, "Number of episodes")->check(CLI::PositiveNumber);
  run_cmd->add_option("--threads", run.threads, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run.out, "Output directory")->required();

  std::string eval_logs, eval_real, eval_metrics, eval_out;
  bool eval_force = false;
  auto* eval_cmd = app.add_subcommand("eval", "Compute metrics from logs");
  eval_cmd->add_option("--logs", eval_logs, "Directory of simulated logs")->required();
  eval_cmd->add_option("--real", eval_real, "Directory of real logs for TrajGap and FS");
  eval_cmd->add_option("--metrics", eval_metrics, "Comma-separated metric list");
  eval_cmd->add_option("--out", eval_out, "CSV output file (stdout if omitted)");
  eval_cmd->add_flag("--force", eval_force, "Accept logs from mixed tool versions");

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit simulator parameters to reference logs");
  cal_cmd->add_option("--method", cal.method, "droid or simopt");
  cal_cmd->add_option("--ref", cal.ref, "Directory of reference logs")->required();
  cal_cmd->add_option("--budget", cal.budget, "Engine replays for droid");
  cal_cmd->add_option("--iterations", cal.iterations, "SimOpt iterations");
  cal_cmd->add_option("--samples", cal.samples, "SimOpt samples per iteration");
  cal_cmd->add_option("--seed", cal.seed, "Search seed");
  cal_cmd->add_option("--params", cal.names, "Comma-separated parameters to fit");
  cal_cmd->add_option("--threads", cal.threads, "Worker threads")->check(CLI::PositiveNumber);
  cal_cmd->add_option("--out", cal.out, "Output directory");
  cal_cmd->add_flag("--force", cal.force, "Accept logs from mixed tool versions");

  int rnd_count = 1;
  std::uint64_t rnd_seed = 0;
  std::string rnd_out = ".", rnd_space;
  auto* rnd_cmd = app.add_subcommand("randomize", "Write uniformly randomized parameter files");
  rnd_cmd->add_option("--count", rnd_count, "Number of parameter files");
  rnd_cmd->add_option("--seed", rnd_seed, "Base seed");
  rnd_cmd->add_option("--out", rnd_out, "Output directory");
  rnd_cmd->add_option("--space", rnd_space, "Parameter space file (JSON)");

  int lay_level = 1;
  std::uint64_t lay_seed = 0;
  std::string lay_out, lay_inspect;
  auto* lay_cmd = app.add_subcommand("layout", "Generate or inspect an arena layout");
  lay_cmd->add_option("--level", lay_level, "Difficulty level 1..3")->check(CLI::Range(1, 3));
  lay_cmd->add_option("--seed", lay_seed, "Layout seed");
  lay_cmd->add_option("--out", lay_out, "Write the layout here instead of stdout");
  lay_cmd->add_option("--inspect", lay_inspect, "Summarize an existing layout file");

  std::vector<std::string> rep_inputs, rep_real, rep_cal;
  std::string rep_out;
  bool rep_force = false;
  auto* rep_cmd = app.add_subcommand("report", "Aggregate tidy CSV for plotting");
  rep_cmd->add_option("--logs", rep_inputs, "method=dir of logs (repeatable)");
  rep_cmd->add_option("--real", rep_real, "method=dir of real logs (repeatable)");
  rep_cmd->add_option("--calibration", rep_cal, "Calibration report file (repeatable)");
  rep_cmd->add_option("--out", rep_out, "CSV output file (stdout if omitted)");
  rep_cmd->add_flag("--force", rep_force, "Accept logs from mixed tool versions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("usage", e.what());
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run, *run_cmd);
    if (*eval_cmd) return cmd_eval(eval_logs, eval_real, eval_metrics, eval_out, eval_force);
    if (*cal_cmd) return cmd_calibrate(cal);
    if (*rnd_cmd) return cmd_randomize(rnd_count, rnd_seed, rnd_out, rnd_space);
    if (*lay_cmd) return cmd_layout(lay_level, lay_seed, lay_out, lay_inspect);
    if (*rep_cmd) {
      if (rep_inputs.empty() && rep_cal.empty())
        throw Error(ErrorCode::kInvalidArgument, "report needs --logs or --calibration");
      return cmd_report(rep_inputs, rep_real, rep_cal, rep_out, rep_force);
    }
  } catch (const Error& e) {
    error_line(arena::to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    error_line("io", e.what());
    return kIo;
  } catch (const std::exception& e) {
    error_line("internal", e.what());
    return kOther;
  }
  return kOther;
}
