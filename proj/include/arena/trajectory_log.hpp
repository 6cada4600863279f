#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "arena/params.hpp"
#include "arena/world.hpp"

namespace arena {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kLogFormatVersion = 1;

/// Episode metadata, written as the first line of a log.
struct LogHeader {
  int format = kLogFormatVersion;
  std::string tool_version = kToolVersion;
  std::string task = "nav";
  int level = 1;
  std::uint64_t seed = 0;
  double max_speed = 1.0;
  double time_limit = 180.0;
  double gamma = 0.99;
  std::string policy = "scripted";
  std::string params_hash;
  std::string layout_hash;
  SimParams params;
  Pose2 initial_pose;
  /// Reference path length of each goal segment; empty when not computed.
  std::vector<double> segment_lengths;
  int n_goals = kGoalCount;

  std::optional<double> shortest_path() const;
};

/// One control tick.
struct LogRecord {
  double t = 0.0;
  std::array<double, 3> pose{};
  std::array<double, 3> vel{};
  std::array<double, 3> odom{};
  std::array<double, 4> cmd{};  ///< u_x, u_y, u_w, fire
  bool collision = false;
  double delta = 0.0;  ///< path length travelled during the tick
  double reward = 0.0;
  std::vector<std::string> events;
};

/// Per-trial outcome, written as the last line of a log.
struct LogSummary {
  int activated = 0;
  bool success = false;
  int hp = 0;
  int damage = 0;
  double elapsed = 0.0;
  double collision_time = 0.0;
  bool confrontation_active = false;
  std::string outcome = "ongoing";
};

struct TrajectoryLog {
  LogHeader header;
  std::vector<LogRecord> records;
  LogSummary summary;
};

/// Newline-delimited JSON: {"header":{...}}, one object per tick, {"summary":{...}}.
void write_log(std::ostream& out, const TrajectoryLog& log);
std::string serialize_log(const TrajectoryLog& log);

/// Throws Error(kMalformedLog) on syntax errors or violated invariants.
TrajectoryLog read_log(std::istream& in);
TrajectoryLog parse_log(const std::string& text);

TrajectoryLog load_log(const std::string& path);
void save_log(const std::string& path, const TrajectoryLog& log);
/// All `*.ndjson` files in a directory, sorted by file name.
std::vector<TrajectoryLog> load_log_dir(const std::string& dir);

}  // namespace arena
