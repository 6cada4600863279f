#include "arena/episode.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "arena/error.hpp"
#include "arena/policies.hpp"
#include "arena/random.hpp"
#include "arena/sim2real.hpp"

namespace arena {

std::string EpisodeConfig::resolved_policy() const {
  if (!policy.empty()) return policy;
  return task == "nav" ? "scripted-nav" : "scripted-combat";
}

void validate(const EpisodeConfig& cfg) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfig, msg); };
  task_from_string(cfg.task);
  if (cfg.level < 1 || cfg.level > 3) fail("level must be 1, 2 or 3");
  if (std::none_of(std::begin(kSpeedPresets), std::end(kSpeedPresets),
                   [&](double s) { return std::abs(s - cfg.max_speed) < 1e-12; }))
    fail("max_speed must be one of 0.5, 1.0, 1.5");
  if (!(cfg.time_limit > 0.0)) fail("time_limit must be positive");
  if (cfg.params_source != "defaults" && cfg.params_source != "file" && cfg.params_source != "udr" &&
      cfg.params_source != "calibrated")
    fail("params_source must be defaults, file, udr or calibrated");
  if ((cfg.params_source == "file" || cfg.params_source == "calibrated") && cfg.params_file.empty())
    fail("params_source '" + cfg.params_source + "' needs params_file");
  const std::string policy = cfg.resolved_policy();
  if (policy != "scripted-nav" && policy != "scripted-combat" && policy != "external")
    fail("policy must be scripted-nav, scripted-combat or external");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (!cfg.param_overrides.is_object()) fail("parameter overrides must be an object");
}

nlohmann::ordered_json to_json(const EpisodeConfig& cfg) {
  nlohmann::ordered_json j;
  j["task"] = cfg.task;
  j["level"] = cfg.level;
  j["seed"] = cfg.seed;
  j["max_speed"] = cfg.max_speed;
  j["time_limit"] = cfg.time_limit;
  j["params_source"] = cfg.params_source;
  j["params_file"] = cfg.params_file;
  j["policy"] = cfg.policy;
  j["commands_file"] = cfg.commands_file;
  j["gamma"] = cfg.gamma;
  for (const auto& [key, value] : cfg.param_overrides.items()) j[key] = value;
  return j;
}

EpisodeConfig episode_config_from_json(const nlohmann::json& j, const EpisodeConfig& base) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "episode config must be an object");
  EpisodeConfig cfg = base;
  nlohmann::json overrides = base.param_overrides;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "task") cfg.task = value.get<std::string>();
      else if (key == "level") cfg.level = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "max_speed") cfg.max_speed = value.get<double>();
      else if (key == "time_limit") cfg.time_limit = value.get<double>();
      else if (key == "params_source") cfg.params_source = value.get<std::string>();
      else if (key == "params_file") cfg.params_file = value.get<std::string>();
      else if (key == "policy") cfg.policy = value.get<std::string>();
      else if (key == "commands_file") cfg.commands_file = value.get<std::string>();
      else if (key == "gamma") cfg.gamma = value.get<double>();
      else overrides[key] = value;
    }
    if (j.contains("level") && !j.at("level").is_number_integer())
      throw Error(ErrorCode::kConfig, "level must be an integer");
    if (j.contains("seed") && !j.at("seed").is_number_unsigned())
      throw Error(ErrorCode::kConfig, "seed must be a non-negative integer");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("episode config: ") + e.what());
  }
  // Unknown keys are rejected by the parameter parser.
  params_from_json(overrides);
  cfg.param_overrides = std::move(overrides);
  validate(cfg);
  return cfg;
}

EpisodeConfig load_episode_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return episode_config_from_json(j);
}

SimParams resolve_params(const EpisodeConfig& cfg) {
  SimParams base;
  if (cfg.params_source == "file") {
    base = load_params(cfg.params_file);
  } else if (cfg.params_source == "calibrated") {
    std::ifstream in(cfg.params_file);
    if (!in) throw Error(ErrorCode::kIo, "cannot open calibration report " + cfg.params_file);
    nlohmann::json report;
    try {
      in >> report;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kConfig, cfg.params_file + ": " + e.what());
    }
    if (!report.is_object() || !report.contains("params"))
      throw Error(ErrorCode::kConfig, cfg.params_file + ": calibration report lacks 'params'");
    base = params_from_json(report.at("params"));
  } else if (cfg.params_source == "udr") {
    std::mt19937_64 rng(derive_seed(cfg.seed, kParamStream));
    base = udr_sample(default_param_space(), rng);
  }
  SimParams p = params_from_json(cfg.param_overrides, base);
  validate(p);
  return p;
}

double EpisodeResult::path_length() const {
  double p = 0.0;
  for (const auto& r : log.records) p += r.delta;
  return p;
}

namespace {

EpisodeResult run_with(const EpisodeConfig& cfg, std::vector<ControlCommand> commands) {
  validate(cfg);
  EnvConfig env_cfg;
  env_cfg.task = task_from_string(cfg.task);
  env_cfg.level = cfg.level;
  env_cfg.seed = cfg.seed;
  env_cfg.max_speed = cfg.max_speed;
  env_cfg.time_limit = cfg.time_limit;
  env_cfg.gamma = cfg.gamma;
  env_cfg.policy = cfg.resolved_policy();
  env_cfg.params = resolve_params(cfg);
  Environment env(env_cfg);
  auto policy = make_policy(env_cfg.policy, env, std::move(commands));
  Observation obs = env.observation();
  while (!env.done()) obs = env.step(policy->act(obs)).observation;
  EpisodeResult r;
  r.log = env.log();
  r.outcome = r.log.summary.outcome;
  r.policy_failed = policy->failed();
  return r;
}

}  // namespace

EpisodeResult run_episode(const EpisodeConfig& cfg) {
  std::vector<ControlCommand> commands;
  if (cfg.resolved_policy() == "external") {
    if (cfg.commands_file.empty())
      throw Error(ErrorCode::kConfig, "external policy needs commands_file");
    commands = load_commands(cfg.commands_file);
  }
  return run_with(cfg, std::move(commands));
}

EpisodeResult run_episode(const EpisodeConfig& cfg, const std::vector<ControlCommand>& commands) {
  return run_with(cfg, commands);
}

std::string log_file_name(const EpisodeConfig& cfg) {
  return cfg.task + "_L" + std::to_string(cfg.level) + "_s" + std::to_string(cfg.seed) + ".ndjson";
}

EpisodeConfig batch_member(const EpisodeConfig& base, int index, int count) {
  EpisodeConfig c = base;
  if (count > 1) c.seed = derive_seed(base.seed, static_cast<std::uint64_t>(index));
  return c;
}

std::vector<std::string> run_batch(const EpisodeConfig& base, int count, int threads,
                                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (count < 1) throw Error(ErrorCode::kConfig, "episode count must be positive");
  validate(base);
  std::vector<ControlCommand> commands;
  if (base.resolved_policy() == "external") {
    if (base.commands_file.empty())
      throw Error(ErrorCode::kConfig, "external policy needs commands_file");
    commands = load_commands(base.commands_file);
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw Error(ErrorCode::kIo, "cannot create " + out_dir);

  std::vector<std::string> paths(static_cast<std::size_t>(count));
  auto run_one = [&](int i) {
    const EpisodeConfig cfg = batch_member(base, i, count);
    const EpisodeResult r = run_with(cfg, commands);
    const std::string path = (fs::path(out_dir) / log_file_name(cfg)).string();
    save_log(path, r.log);
    paths[static_cast<std::size_t>(i)] = path;
  };

  const int workers = std::clamp(threads, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) run_one(i);
    return paths;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < count; i = next++) run_one(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return paths;
}

}  // namespace arena
