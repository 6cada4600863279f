#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arena/environment.hpp"
#include "arena/trajectory_log.hpp"

namespace arena {

inline constexpr double kSpeedPresets[] = {0.5, 1.0, 1.5};

/// Flat episode description. Config files use exactly these field names plus
/// any SimParams field, which overrides the resolved parameter set.
struct EpisodeConfig {
  std::string task = "nav";
  int level = 1;
  std::uint64_t seed = 0;
  double max_speed = 1.0;
  double time_limit = kMatchDuration;
  /// defaults | file | udr | calibrated
  std::string params_source = "defaults";
  /// Parameter file (file) or calibration report (calibrated).
  std::string params_file;
  /// scripted-nav | scripted-combat | external; empty picks the task default.
  std::string policy;
  /// Command list for the external policy.
  std::string commands_file;
  double gamma = 0.99;
  nlohmann::json param_overrides = nlohmann::json::object();

  std::string resolved_policy() const;
};

/// Throws Error(kConfig) on invalid enum values or ranges.
void validate(const EpisodeConfig& cfg);

nlohmann::ordered_json to_json(const EpisodeConfig& cfg);
/// Strict: unknown keys and mistyped values are Error(kConfig).
EpisodeConfig episode_config_from_json(const nlohmann::json& j,
                                       const EpisodeConfig& base = {});
EpisodeConfig load_episode_config(const std::string& path);

/// Parameters for the episode: source, then overrides. UDR draws from a
/// stream derived from the episode seed.
SimParams resolve_params(const EpisodeConfig& cfg);

struct EpisodeResult {
  TrajectoryLog log;
  std::string outcome;
  bool policy_failed = false;

  int activated() const { return log.summary.activated; }
  std::optional<double> shortest_path() const { return log.header.shortest_path(); }
  double path_length() const;
  int hp() const { return log.summary.hp; }
  int damage() const { return log.summary.damage; }
  double elapsed() const { return log.summary.elapsed; }
  double collision_time() const { return log.summary.collision_time; }
};

/// Runs one episode to its terminal condition. Deterministic in the config.
EpisodeResult run_episode(const EpisodeConfig& cfg);

/// Same with an explicit command list for the external policy.
EpisodeResult run_episode(const EpisodeConfig& cfg, const std::vector<ControlCommand>& commands);

/// "<task>_L<level>_s<seed>.ndjson"
std::string log_file_name(const EpisodeConfig& cfg);

/// Config of episode i in a batch: the base seed for a single episode,
/// derive_seed(base, i) otherwise.
EpisodeConfig batch_member(const EpisodeConfig& base, int index, int count);

/// Runs `count` episodes on `threads` workers and writes one log per episode
/// into `out_dir`. Returns the written paths in episode order.
std::vector<std::string> run_batch(const EpisodeConfig& base, int count, int threads,
                                   const std::string& out_dir);

}  // namespace arena
