#include "arena/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "arena/error.hpp"
#include "arena/grid.hpp"
#include "arena/params.hpp"

namespace arena {

namespace {

constexpr double kGoalClearance = 0.3;
constexpr double kSpawnClearance = 0.8;
constexpr int kMaxRejections = 10000;
// Goal placement must leave the activation region reachable for this radius.
constexpr double kPlacementRobotRadius = 0.2;
constexpr double kPlacementReach = 0.9;

Obstacle box(double cx, double cy, double sx, double sy, HeightClass h, double rot = 0.0) {
  return {OrientedBox{Vec2{cx, cy}, Vec2{sx / 2.0, sy / 2.0}, rot}, h};
}

}  // namespace

ArenaLayout default_template() {
  using enum HeightClass;
  ArenaLayout l;
  l.obstacles = {
      box(0.50, 3.70, 1.00, 0.20, kHigh), box(7.50, 1.30, 1.00, 0.20, kHigh),
      box(1.60, 0.50, 0.20, 1.00, kHigh), box(6.40, 4.50, 0.20, 1.00, kHigh),
      box(1.90, 2.40, 0.80, 0.20, kLow),  box(6.10, 2.60, 0.80, 0.20, kLow),
      box(4.00, 1.10, 1.00, 0.20, kLow),  box(4.00, 3.90, 1.00, 0.20, kLow),
      box(2.60, 4.45, 0.20, 1.10, kHigh), box(5.40, 0.55, 0.20, 1.10, kHigh),
      box(4.00, 2.50, 0.30, 0.30, kHigh, std::numbers::pi / 4.0),
  };
  l.blocking_zones = {
      AlignedRect{Vec2{0.0, 3.8}, Vec2{1.3, 5.0}},
      AlignedRect{Vec2{6.7, 0.0}, Vec2{8.0, 1.2}},
      AlignedRect{Vec2{0.0, 0.0}, Vec2{1.5, 1.1}},
      AlignedRect{Vec2{6.5, 3.9}, Vec2{8.0, 5.0}},
  };
  l.blue_spawn = {0.5, 2.0, 0.0};
  l.red_spawn = {7.5, 3.0, std::numbers::pi};
  l.patrol = {Vec2{6.8, 3.2}, Vec2{5.2, 3.2}, Vec2{5.2, 1.8}, Vec2{6.8, 1.8}};
  return l;
}

Circle Footprint::circle_at(const Pose2& pose) const {
  return {pose.position() + rotate(circle_offset, pose.theta), radius};
}

OrientedBox Footprint::box_at(const Pose2& pose) const {
  return {pose.position(), half_extents, pose.theta};
}

double Footprint::bounding_radius() const {
  return std::max(circle_offset.norm() + radius, half_extents.norm());
}

int LevelSpec::goals_in_zones() const {
  static constexpr int kCounts[] = {0, 1, 3};
  return kCounts[level - 1];
}

LevelSpec level_spec(int level) {
  if (level < 1 || level > 3)
    throw Error(ErrorCode::kInvalidArgument, "level must be 1, 2 or 3");
  return {level};
}

bool goal_inside_zone(const Goal& goal, const ArenaLayout& layout) {
  return std::any_of(layout.blocking_zones.begin(), layout.blocking_zones.end(),
                     [&](const AlignedRect& z) { return z.contains(goal.box()); });
}

bool goal_touches_zone(const Goal& goal, const ArenaLayout& layout) {
  return std::any_of(layout.blocking_zones.begin(), layout.blocking_zones.end(),
                     [&](const AlignedRect& z) { return z.intersects(goal.box()); });
}

namespace {

bool placement_ok(const Goal& g, const ArenaLayout& layout) {
  const OrientedBox b = g.box();
  for (const Vec2& c : b.corners()) {
    if (c.x() < kGoalClearance || c.y() < kGoalClearance ||
        c.x() > layout.width - kGoalClearance || c.y() > layout.height - kGoalClearance)
      return false;
  }
  for (const auto& o : layout.obstacles)
    if (box_distance(b, o.box) < kGoalClearance) return false;
  for (const auto& other : layout.goals)
    if (box_distance(b, other.box()) < kGoalClearance) return false;
  for (const Pose2& s : {layout.blue_spawn, layout.red_spawn})
    if ((s.position() - g.position).norm() < kSpawnClearance) return false;
  return true;
}

}  // namespace

ArenaLayout generate_layout(const LevelSpec& level, std::uint64_t seed,
                            const ArenaLayout& layout_template) {
  const int in_zone = level.goals_in_zones();
  if (in_zone > 0 && layout_template.blocking_zones.empty())
    throw Error(ErrorCode::kLayoutGeneration, "template has no blocking zones");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Which of the five labels go into zones.
  std::array<int, kGoalCount> order{0, 1, 2, 3, 4};
  std::shuffle(order.begin(), order.end(), rng);
  std::array<bool, kGoalCount> zoned{};
  for (int k = 0; k < in_zone; ++k) zoned[order[k]] = true;

  int rejections = 0;
  while (true) {
    ArenaLayout layout = layout_template;
    layout.goals.clear();
    bool ok = true;
    for (int i = 0; i < kGoalCount && ok; ++i) {
      Goal g;
      g.label = static_cast<char>('A' + i);
      while (true) {
        if (zoned[i]) {
          std::uniform_int_distribution<std::size_t> pick(0, layout.blocking_zones.size() - 1);
          const AlignedRect& z = layout.blocking_zones[pick(rng)];
          g.position = z.min + Vec2{unit(rng) * (z.max.x() - z.min.x()),
                                    unit(rng) * (z.max.y() - z.min.y())};
        } else {
          g.position = Vec2{unit(rng) * layout.width, unit(rng) * layout.height};
        }
        g.yaw = 0.0;
        const bool zone_ok = zoned[i] ? goal_inside_zone(g, layout) : !goal_touches_zone(g, layout);
        if (zone_ok && placement_ok(g, layout)) break;
        if (++rejections > kMaxRejections)
          throw Error(ErrorCode::kLayoutGeneration,
                      "goal placement failed after " + std::to_string(kMaxRejections) +
                          " rejections");
      }
      layout.goals.push_back(g);
    }
    try {
      activation_segments(layout.blue_spawn, layout, kPlacementRobotRadius, kPlacementReach);
    } catch (const Error&) {
      ok = false;
    }
    if (ok) return layout;
    if (++rejections > kMaxRejections)
      throw Error(ErrorCode::kLayoutGeneration, "no reachable goal arrangement found");
  }
}

namespace {

void keep_deepest(Contact& best, const Contact& c) {
  if (c.colliding && c.depth > best.depth) best = c;
}

}  // namespace

Contact collide(const Pose2& pose, const Footprint& fp, const ArenaLayout& layout,
                std::span<const BodyObstacle> others) {
  const Circle circle = fp.circle_at(pose);
  const OrientedBox body = fp.box_at(pose);
  Contact best;
  keep_deepest(best, circle_vs_bounds(circle, layout.width, layout.height));
  keep_deepest(best, box_vs_bounds(body, layout.width, layout.height));
  auto against_box = [&](const OrientedBox& b) {
    keep_deepest(best, circle_vs_box(circle, b));
    keep_deepest(best, box_vs_box(body, b));
  };
  for (const auto& o : layout.obstacles) against_box(o.box);
  for (const auto& g : layout.goals) against_box(g.box());
  for (const auto& other : others) {
    const Circle oc = other.footprint.circle_at(other.pose);
    const OrientedBox ob = other.footprint.box_at(other.pose);
    keep_deepest(best, circle_vs_circle(circle, oc));
    against_box(ob);
    // the other body's circle against our box: normal flips sign
    Contact c = circle_vs_box(oc, body);
    c.normal = -c.normal;
    keep_deepest(best, c);
  }
  return best;
}

BodyState resolve_collision(const BodyState& body, const Contact& contact) {
  if (!contact.colliding) return body;
  BodyState out = body;
  out.x += contact.normal.x() * contact.depth;
  out.y += contact.normal.y() * contact.depth;
  Vec2 v = body.world_velocity();
  const double into = v.dot(contact.normal);
  if (into < 0.0) v -= into * contact.normal;
  const Vec2 local = rotate(v, -body.theta);
  out.v_x = local.x();
  out.v_y = local.y();
  return out;
}

SettleResult settle(const BodyState& moved, const BodyState& previous, const Footprint& footprint,
                    const ArenaLayout& layout, std::span<const BodyObstacle> others,
                    int iterations) {
  auto contact_at = [&](const BodyState& b) {
    return collide({b.x, b.y, b.theta}, footprint, layout, others);
  };
  SettleResult r{moved, false};
  const Contact first = contact_at(moved);
  if (!first.colliding) return r;
  r.collided = true;
  Contact c = first;
  for (int it = 0; it < iterations && c.colliding; ++it) {
    r.body = resolve_collision(r.body, c);
    c = contact_at(r.body);
  }
  if (!c.colliding || c.depth <= contact_at(previous).depth) return r;
  BodyState back = resolve_collision(moved, first);
  back.x = previous.x;
  back.y = previous.y;
  back.theta = previous.theta;
  r.body = back;
  return r;
}

std::optional<double> ray_footprint(const Vec2& origin, const Vec2& dir, const BodyObstacle& b) {
  const auto tc = ray_circle(origin, dir, b.footprint.circle_at(b.pose));
  const auto tb = ray_box(origin, dir, b.footprint.box_at(b.pose));
  if (tc && tb) return std::min(*tc, *tb);
  return tc ? tc : tb;
}

double raycast(const Vec2& origin, const Vec2& dir, const ArenaLayout& layout, RayClass cls,
               double max_range, std::span<const BodyObstacle> others) {
  double t = ray_bounds(origin, dir, layout.width, layout.height);
  for (const auto& o : layout.obstacles) {
    if (cls == RayClass::kShot && o.height == HeightClass::kLow) continue;
    if (auto hit = ray_box(origin, dir, o.box)) t = std::min(t, *hit);
  }
  for (const auto& g : layout.goals)
    if (auto hit = ray_box(origin, dir, g.box())) t = std::min(t, *hit);
  for (const auto& b : others)
    if (auto hit = ray_footprint(origin, dir, b)) t = std::min(t, *hit);
  return std::min(t, max_range);
}

namespace {

nlohmann::ordered_json vec(const Vec2& v) { return nlohmann::ordered_json::array({v.x(), v.y()}); }

Vec2 read_vec(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorCode::kConfig, std::string(what) + " must be a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

Pose2 read_pose(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::kConfig, std::string(what) + " must be [x, y, theta]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::kConfig, std::string("layout is missing '") + key + "'");
  return j.at(key);
}

}  // namespace

nlohmann::ordered_json to_json(const ArenaLayout& l) {
  nlohmann::ordered_json j;
  j["width"] = l.width;
  j["height"] = l.height;
  j["obstacles"] = nlohmann::ordered_json::array();
  for (const auto& o : l.obstacles) {
    nlohmann::ordered_json e;
    e["center"] = vec(o.box.center);
    e["half_extents"] = vec(o.box.half_extents);
    e["rotation"] = o.box.rotation;
    e["height_class"] = o.height == HeightClass::kLow ? "low" : "high";
    j["obstacles"].push_back(e);
  }
  j["goals"] = nlohmann::ordered_json::array();
  for (const auto& g : l.goals) {
    nlohmann::ordered_json e;
    e["label"] = std::string(1, g.label);
    e["position"] = vec(g.position);
    e["yaw"] = g.yaw;
    j["goals"].push_back(e);
  }
  j["blocking_zones"] = nlohmann::ordered_json::array();
  for (const auto& z : l.blocking_zones) {
    nlohmann::ordered_json e;
    e["min"] = vec(z.min);
    e["max"] = vec(z.max);
    j["blocking_zones"].push_back(e);
  }
  j["blue_spawn"] = {l.blue_spawn.x, l.blue_spawn.y, l.blue_spawn.theta};
  j["red_spawn"] = {l.red_spawn.x, l.red_spawn.y, l.red_spawn.theta};
  j["patrol"] = nlohmann::ordered_json::array();
  for (const auto& p : l.patrol) j["patrol"].push_back(vec(p));
  return j;
}

ArenaLayout layout_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "layout must be an object");
  static const std::vector<std::string> kKeys{"width",          "height",     "obstacles",
                                              "goals",          "blocking_zones", "blue_spawn",
                                              "red_spawn",      "patrol"};
  for (const auto& [key, _] : j.items())
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw Error(ErrorCode::kConfig, "unknown layout key '" + key + "'");
  try {
    ArenaLayout l;
    l.width = require(j, "width").get<double>();
    l.height = require(j, "height").get<double>();
    for (const auto& e : require(j, "obstacles")) {
      Obstacle o;
      o.box.center = read_vec(e.at("center"), "obstacle center");
      o.box.half_extents = read_vec(e.at("half_extents"), "obstacle half_extents");
      o.box.rotation = e.value("rotation", 0.0);
      const std::string h = e.at("height_class").get<std::string>();
      if (h != "low" && h != "high")
        throw Error(ErrorCode::kConfig, "height_class must be 'low' or 'high'");
      o.height = h == "low" ? HeightClass::kLow : HeightClass::kHigh;
      l.obstacles.push_back(o);
    }
    if (j.contains("goals")) {
      for (const auto& e : j.at("goals")) {
        Goal g;
        const std::string label = e.at("label").get<std::string>();
        if (label.size() != 1 || label[0] < 'A' || label[0] > 'E')
          throw Error(ErrorCode::kConfig, "goal label must be one of A..E");
        g.label = label[0];
        g.position = read_vec(e.at("position"), "goal position");
        g.yaw = e.value("yaw", 0.0);
        l.goals.push_back(g);
      }
    }
    for (const auto& e : require(j, "blocking_zones"))
      l.blocking_zones.push_back({read_vec(e.at("min"), "zone min"), read_vec(e.at("max"), "zone max")});
    l.blue_spawn = read_pose(require(j, "blue_spawn"), "blue_spawn");
    l.red_spawn = read_pose(require(j, "red_spawn"), "red_spawn");
    if (j.contains("patrol"))
      for (const auto& e : j.at("patrol")) l.patrol.push_back(read_vec(e, "patrol point"));
    if (l.width <= 0.0 || l.height <= 0.0)
      throw Error(ErrorCode::kConfig, "arena dimensions must be positive");
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed layout: ") + e.what());
  }
}

ArenaLayout load_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open layout file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return layout_from_json(j);
}

void save_layout(const std::string& path, const ArenaLayout& layout) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << to_json(layout).dump(2) << '\n';
}

std::string layout_hash(const ArenaLayout& layout) {
  return hex64(fnv1a64(to_json(layout).dump()));
}

}  // namespace arena
