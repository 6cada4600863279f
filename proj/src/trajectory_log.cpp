#include "arena/trajectory_log.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "arena/error.hpp"

namespace arena {

using ojson = nlohmann::ordered_json;

std::optional<double> LogHeader::shortest_path() const {
  if (segment_lengths.empty()) return std::nullopt;
  return std::accumulate(segment_lengths.begin(), segment_lengths.end(), 0.0);
}

namespace {

ojson header_json(const LogHeader& h) {
  ojson j;
  j["format"] = h.format;
  j["tool_version"] = h.tool_version;
  j["task"] = h.task;
  j["level"] = h.level;
  j["seed"] = h.seed;
  j["max_speed"] = h.max_speed;
  j["time_limit"] = h.time_limit;
  j["gamma"] = h.gamma;
  j["policy"] = h.policy;
  j["params_hash"] = h.params_hash;
  j["layout_hash"] = h.layout_hash;
  j["params"] = to_json(h.params);
  j["initial_pose"] = {h.initial_pose.x, h.initial_pose.y, h.initial_pose.theta};
  j["segment_lengths"] = h.segment_lengths;
  j["n_goals"] = h.n_goals;
  return j;
}

ojson record_json(const LogRecord& r) {
  ojson j;
  j["t"] = r.t;
  j["pose"] = r.pose;
  j["vel"] = r.vel;
  j["odom"] = r.odom;
  j["cmd"] = r.cmd;
  j["collision"] = r.collision;
  j["delta"] = r.delta;
  j["reward"] = r.reward;
  j["events"] = r.events;
  return j;
}

ojson summary_json(const LogSummary& s) {
  ojson j;
  j["activated"] = s.activated;
  j["success"] = s.success;
  j["hp"] = s.hp;
  j["damage"] = s.damage;
  j["elapsed"] = s.elapsed;
  j["collision_time"] = s.collision_time;
  j["confrontation_active"] = s.confrontation_active;
  j["outcome"] = s.outcome;
  return j;
}

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::kMalformedLog, what); }

template <std::size_t N>
std::array<double, N> read_array(const nlohmann::json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != N) malformed(std::string("field '") + key + "' has wrong length");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = a[i].get<double>();
  return out;
}

LogHeader parse_header(const nlohmann::json& j) {
  LogHeader h;
  h.format = j.at("format").get<int>();
  if (h.format != kLogFormatVersion) malformed("unsupported log format " + std::to_string(h.format));
  h.tool_version = j.at("tool_version").get<std::string>();
  h.task = j.at("task").get<std::string>();
  h.level = j.at("level").get<int>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.max_speed = j.at("max_speed").get<double>();
  h.time_limit = j.at("time_limit").get<double>();
  h.gamma = j.at("gamma").get<double>();
  h.policy = j.at("policy").get<std::string>();
  h.params_hash = j.at("params_hash").get<std::string>();
  h.layout_hash = j.at("layout_hash").get<std::string>();
  h.params = params_from_json(j.at("params"));
  const auto pose = read_array<3>(j, "initial_pose");
  h.initial_pose = {pose[0], pose[1], pose[2]};
  h.segment_lengths = j.at("segment_lengths").get<std::vector<double>>();
  h.n_goals = j.at("n_goals").get<int>();
  return h;
}

LogRecord parse_record(const nlohmann::json& j) {
  LogRecord r;
  r.t = j.at("t").get<double>();
  r.pose = read_array<3>(j, "pose");
  r.vel = read_array<3>(j, "vel");
  r.odom = read_array<3>(j, "odom");
  r.cmd = read_array<4>(j, "cmd");
  r.collision = j.at("collision").get<bool>();
  r.delta = j.at("delta").get<double>();
  r.reward = j.at("reward").get<double>();
  r.events = j.at("events").get<std::vector<std::string>>();
  return r;
}

LogSummary parse_summary(const nlohmann::json& j) {
  LogSummary s;
  s.activated = j.at("activated").get<int>();
  s.success = j.at("success").get<bool>();
  s.hp = j.at("hp").get<int>();
  s.damage = j.at("damage").get<int>();
  s.elapsed = j.at("elapsed").get<double>();
  s.collision_time = j.at("collision_time").get<double>();
  s.confrontation_active = j.at("confrontation_active").get<bool>();
  s.outcome = j.at("outcome").get<std::string>();
  return s;
}

}  // namespace

void write_log(std::ostream& out, const TrajectoryLog& log) {
  out << ojson{{"header", header_json(log.header)}}.dump() << '\n';
  for (const auto& r : log.records) out << record_json(r).dump() << '\n';
  out << ojson{{"summary", summary_json(log.summary)}}.dump() << '\n';
}

std::string serialize_log(const TrajectoryLog& log) {
  std::ostringstream os;
  write_log(os, log);
  return os.str();
}

TrajectoryLog read_log(std::istream& in) {
  TrajectoryLog log;
  bool have_header = false, have_summary = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (have_summary) malformed("content after summary at line " + std::to_string(line_no));
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) malformed("line " + std::to_string(line_no) + " is not an object");
      if (j.contains("header")) {
        if (have_header) malformed("duplicate header");
        log.header = parse_header(j.at("header"));
        have_header = true;
      } else if (j.contains("summary")) {
        log.summary = parse_summary(j.at("summary"));
        have_summary = true;
      } else {
        if (!have_header) malformed("record before header");
        log.records.push_back(parse_record(j));
      }
    } catch (const nlohmann::json::exception& e) {
      malformed("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kMalformedLog) throw;
      malformed("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) malformed("missing header");
  if (!have_summary) malformed("missing summary");
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    if (log.records[i].delta < 0.0) malformed("negative step displacement");
    if (i > 0 && !(log.records[i].t > log.records[i - 1].t)) malformed("timestamps not increasing");
  }
  if (log.summary.activated > log.header.n_goals) malformed("more activations than goals");
  return log;
}

TrajectoryLog parse_log(const std::string& text) {
  std::istringstream is(text);
  return read_log(is);
}

TrajectoryLog load_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open log " + path);
  try {
    return read_log(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_log(const std::string& path, const TrajectoryLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  write_log(out, log);
}

std::vector<TrajectoryLog> load_log_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".ndjson") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<TrajectoryLog> logs;
  logs.reserve(files.size());
  for (const auto& f : files) logs.push_back(load_log(f.string()));
  return logs;
}

}  // namespace arena
