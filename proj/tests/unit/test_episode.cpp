#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "arena/environment.hpp"
#include "arena/episode.hpp"
#include "arena/error.hpp"
#include "arena/metrics.hpp"
#include "arena/policies.hpp"

using namespace arena;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("arena_episode_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("same config, byte-identical log") {
  EpisodeConfig c;
  c.task = "combined";
  c.level = 2;
  c.seed = 5;
  c.time_limit = 40.0;
  const auto a = run_episode(c), b = run_episode(c);
  CHECK(serialize_log(a.log) == serialize_log(b.log));
  c.seed = 6;
  CHECK(serialize_log(run_episode(c).log) != serialize_log(a.log));
}

TEST_CASE("batch output does not depend on the thread count") {
  EpisodeConfig c;
  c.level = 1;
  c.seed = 11;
  c.time_limit = 20.0;
  const auto one = scratch("t1"), many = scratch("t4");
  const auto p1 = run_batch(c, 4, 1, one.string());
  const auto p4 = run_batch(c, 4, 4, many.string());
  REQUIRE(p1.size() == 4);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(fs::path(p1[i]).filename() == fs::path(p4[i]).filename());
    CHECK(slurp(p1[i]) == slurp(p4[i]));
  }
  CHECK(batch_member(c, 0, 1).seed == 11);
  CHECK(batch_member(c, 0, 4).seed != 11);
  fs::remove_all(one);
  fs::remove_all(many);
}

TEST_CASE("strict config parsing") {
  const auto ok = episode_config_from_json(nlohmann::json{{"task", "combat"}, {"level", 3}, {"c_t", 0.4}});
  CHECK(ok.task == "combat");
  CHECK(resolve_params(ok).c_t == 0.4);
  for (const auto& bad : {nlohmann::json{{"tsak", "nav"}}, nlohmann::json{{"level", 4}},
                          nlohmann::json{{"level", 1.5}}, nlohmann::json{{"max_speed", 0.7}},
                          nlohmann::json{{"task", "race"}}, nlohmann::json{{"policy", "smart"}},
                          nlohmann::json{{"params_source", "file"}}, nlohmann::json{{"seed", -1}}}) {
    try {
      episode_config_from_json(bad);
      FAIL("accepted " << bad.dump());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfig);
    }
  }
  const auto back = episode_config_from_json(nlohmann::json::parse(to_json(ok).dump()));
  CHECK(to_json(back).dump() == to_json(ok).dump());
}

TEST_CASE("udr parameters follow the episode seed") {
  EpisodeConfig c;
  c.params_source = "udr";
  c.seed = 3;
  const SimParams a = resolve_params(c), b = resolve_params(c);
  CHECK(a == b);
  c.seed = 4;
  CHECK_FALSE(resolve_params(c) == a);
}

TEST_CASE("scripted navigation succeeds on level 1") {
  int full = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EpisodeConfig c;
    c.seed = seed;
    const auto r = run_episode(c);
    if (r.activated() == 5) ++full;
  }
  CHECK(full >= 18);
}

TEST_CASE("log invariants") {
  EpisodeConfig c;
  c.task = "combined";
  c.seed = 2;
  c.time_limit = 60.0;
  const auto r = run_episode(c);
  const auto& recs = r.log.records;
  REQUIRE_FALSE(recs.empty());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].delta >= 0.0);
    if (i) CHECK(recs[i].t > recs[i - 1].t);
  }
  CHECK(std::abs(recs.size() * 0.1 - r.elapsed()) <= 0.1 + 1e-9);
  CHECK(r.log.header.seed == 2);
  CHECK_FALSE(r.log.header.params_hash.empty());
  CHECK_FALSE(r.log.header.layout_hash.empty());
  CHECK(r.log.header.tool_version == std::string(kToolVersion));
}

TEST_CASE("combined task without navigation never fights") {
  EpisodeConfig c;
  c.task = "combined";
  c.policy = "external";
  c.time_limit = 30.0;
  const std::vector<ControlCommand> spin(300, ControlCommand{0.0, 0.0, 1.0, true});
  const auto r = run_episode(c, spin);
  CHECK(r.activated() == 0);
  CHECK_FALSE(r.log.summary.confrontation_active);
  CHECK(r.damage() == 0);
  CHECK(r.hp() == kInitialHp);
  for (const auto& rec : r.log.records)
    for (const auto& e : rec.events) CHECK(e.find("fire") == std::string::npos);
}

TEST_CASE("navigation policy rotates in place inside the activation zone") {
  EnvConfig cfg;
  cfg.params.sigma_l = 0.0;
  Environment env(cfg);
  ScriptedNavPolicy policy(env.layout(), 1.0, 2.0);
  Observation obs = env.observation();
  REQUIRE(obs.target.has_value());
  const Vec2 goal = *obs.target;
  // just in front of the goal, facing away from it
  const Vec2 away = (goal - Vec2(4.0, 2.5)).normalized();
  obs.pose = {goal.x() - 0.5 * away.x(), goal.y() - 0.5 * away.y(), std::atan2(-away.y(), -away.x())};
  const ControlCommand cmd = policy.act(obs);
  CHECK(std::hypot(cmd.u_x, cmd.u_y) == doctest::Approx(0.0));
  CHECK(std::abs(cmd.u_w) > 0.5);
}

TEST_CASE("an unreachable goal fails the policy and the episode runs to the limit") {
  ArenaLayout layout;
  layout.blue_spawn = {1.0, 2.5, 0.0};
  layout.red_spawn = {7.0, 2.5, 3.14};
  // goal A inside a sealed box
  layout.obstacles.push_back({{{6.0, 1.5}, {1.0, 0.05}, 0.0}, HeightClass::kHigh});
  layout.obstacles.push_back({{{6.0, 3.5}, {1.0, 0.05}, 0.0}, HeightClass::kHigh});
  layout.obstacles.push_back({{{5.0, 2.5}, {0.05, 1.0}, 0.0}, HeightClass::kHigh});
  layout.obstacles.push_back({{{7.0, 2.5}, {0.05, 1.0}, 0.0}, HeightClass::kHigh});
  for (int i = 0; i < 5; ++i)
    layout.goals.push_back({static_cast<char>('A' + i), {i == 0 ? 6.0 : 1.0 + 0.8 * i, i == 0 ? 2.5 : 4.3}, 0.0});
  EnvConfig cfg;
  cfg.layout = layout;
  cfg.time_limit = 10.0;
  Environment env(cfg);
  ScriptedNavPolicy policy(env.layout(), 1.0, 2.0);
  Observation obs = env.observation();
  while (!env.done()) obs = env.step(policy.act(obs)).observation;
  CHECK(policy.failed());
  CHECK(env.ticks() == 100);
  CHECK(env.log().summary.outcome == "timeout");
  CHECK(env.nav().next_goal == 0);
}

TEST_CASE("commands file parsing") {
  const auto dir = scratch("cmds");
  fs::create_directories(dir);
  const auto path = (dir / "c.txt").string();
  std::ofstream(path) << "# header\n0.5,0,0\n\n0,0.2,-1,1\n";
  const auto cmds = load_commands(path);
  REQUIRE(cmds.size() == 2);
  CHECK(cmds[1] == ControlCommand{0.0, 0.2, -1.0, true});
  std::ofstream(path) << "0.5,zero,0\n";
  CHECK_THROWS_AS(load_commands(path), Error);
  fs::remove_all(dir);
}
