#include "arena/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <queue>

#include "arena/error.hpp"

namespace arena {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<std::array<int, 2>, 8> kNeighbors{
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

double clearance(const Vec2& p, const ArenaLayout& layout) {
  double d = std::min({p.x(), layout.width - p.x(), p.y(), layout.height - p.y()});
  for (const auto& o : layout.obstacles) d = std::min(d, o.box.distance(p));
  for (const auto& g : layout.goals) d = std::min(d, g.box().distance(p));
  return d;
}

}  // namespace

OccupancyGrid::OccupancyGrid(const ArenaLayout& layout, double inflation, double resolution)
    : cols_(static_cast<int>(std::ceil(layout.width / resolution - 1e-9))),
      rows_(static_cast<int>(std::ceil(layout.height / resolution - 1e-9))),
      resolution_(resolution),
      blocked_(static_cast<std::size_t>(cols_ * rows_), 0) {
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      blocked_[index({c, r})] = clearance(center({c, r}), layout) <= inflation ? 1 : 0;
}

bool OccupancyGrid::in_bounds(const Cell& c) const {
  return c.col >= 0 && c.row >= 0 && c.col < cols_ && c.row < rows_;
}

bool OccupancyGrid::blocked(const Cell& c) const { return !in_bounds(c) || blocked_[index(c)]; }

OccupancyGrid::Cell OccupancyGrid::cell_of(const Vec2& p) const {
  return {std::clamp(static_cast<int>(std::floor(p.x() / resolution_)), 0, cols_ - 1),
          std::clamp(static_cast<int>(std::floor(p.y() / resolution_)), 0, rows_ - 1)};
}

Vec2 OccupancyGrid::center(const Cell& c) const {
  return {(c.col + 0.5) * resolution_, (c.row + 0.5) * resolution_};
}

std::optional<OccupancyGrid::Cell> OccupancyGrid::nearest_free(const Cell& start) const {
  if (!blocked(start)) return start;
  std::vector<unsigned char> seen(blocked_.size(), 0);
  std::deque<Cell> queue{start};
  seen[index(start)] = 1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (const auto& [dc, dr] : kNeighbors) {
      const Cell n{c.col + dc, c.row + dr};
      if (!in_bounds(n) || seen[index(n)]) continue;
      if (!blocked(n)) return n;
      seen[index(n)] = 1;
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

namespace {

struct Search {
  std::vector<double> dist;
  std::vector<int> parent;
};

/// Dijkstra; stops early when a cell satisfying `is_target` is settled and
/// returns its index (or -1).
template <typename Target>
int dijkstra(const OccupancyGrid& grid, const std::vector<OccupancyGrid::Cell>& sources,
             Search& s, Target is_target) {
  const std::size_t n = static_cast<std::size_t>(grid.cols() * grid.rows());
  s.dist.assign(n, kInf);
  s.parent.assign(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  for (const auto& c : sources) {
    if (grid.blocked(c)) continue;
    s.dist[grid.index(c)] = 0.0;
    open.emplace(0.0, grid.index(c));
  }
  const double h = grid.resolution();
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > s.dist[i]) continue;
    if (is_target(i)) return i;
    const OccupancyGrid::Cell c = grid.cell_at(i);
    for (const auto& [dc, dr] : kNeighbors) {
      const OccupancyGrid::Cell nb{c.col + dc, c.row + dr};
      if (grid.blocked(nb)) continue;
      // no corner cutting through blocked cells
      if (dc != 0 && dr != 0 &&
          (grid.blocked({c.col + dc, c.row}) || grid.blocked({c.col, c.row + dr})))
        continue;
      const double step = (dc != 0 && dr != 0) ? std::numbers::sqrt2 * h : h;
      const int j = grid.index(nb);
      if (d + step < s.dist[j]) {
        s.dist[j] = d + step;
        s.parent[j] = i;
        open.emplace(s.dist[j], j);
      }
    }
  }
  return -1;
}

}  // namespace

std::vector<double> grid_distances(const OccupancyGrid& grid,
                                   const std::vector<OccupancyGrid::Cell>& sources) {
  Search s;
  dijkstra(grid, sources, s, [](int) { return false; });
  return s.dist;
}

bool segment_clear(const Vec2& a, const Vec2& b, const ArenaLayout& layout, double radius) {
  const double len = (b - a).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.01)));
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    if (clearance(a + t * (b - a), layout) <= radius) return false;
  }
  return true;
}

double shortest_path_length(const Vec2& start, const Vec2& goal, const ArenaLayout& layout,
                            double robot_radius) {
  const OccupancyGrid grid(layout, robot_radius);
  const auto s = grid.cell_of(start);
  const auto g = grid.cell_of(goal);
  if (grid.blocked(s) || clearance(start, layout) <= robot_radius)
    throw Error(ErrorCode::kUnreachable, "start lies inside an inflated obstacle");
  if (grid.blocked(g) || clearance(goal, layout) <= robot_radius)
    throw Error(ErrorCode::kUnreachable, "goal lies inside an inflated obstacle");
  const double euclid = (goal - start).norm();
  if (segment_clear(start, goal, layout, robot_radius)) return euclid;
  const auto dist = grid_distances(grid, {s});
  const double d = dist[grid.index(g)];
  if (!std::isfinite(d)) throw Error(ErrorCode::kUnreachable, "goal is disconnected from start");
  return std::max(d, euclid);
}

std::optional<GridPath> plan_to_region(const OccupancyGrid& grid, const Vec2& start,
                                       const Vec2& target, double reach) {
  const auto s = grid.nearest_free(grid.cell_of(start));
  if (!s) return std::nullopt;
  Search search;
  const int hit = dijkstra(grid, {*s}, search, [&](int i) {
    return (grid.center(grid.cell_at(i)) - target).norm() < reach;
  });
  if (hit < 0) return std::nullopt;
  GridPath path;
  path.length = search.dist[hit];
  for (int i = hit; i >= 0; i = search.parent[i]) path.waypoints.push_back(grid.center(grid.cell_at(i)));
  std::reverse(path.waypoints.begin(), path.waypoints.end());
  return path;
}

std::vector<double> activation_segments(const Pose2& spawn, const ArenaLayout& layout,
                                        double robot_radius, double reach) {
  const OccupancyGrid grid(layout, robot_radius);
  std::vector<double> segments;
  Vec2 from = spawn.position();
  for (const auto& goal : layout.goals) {
    if ((goal.position - from).norm() < reach) {
      segments.push_back(0.0);
      continue;
    }
    auto path = plan_to_region(grid, from, goal.position, reach);
    if (!path)
      throw Error(ErrorCode::kUnreachable,
                  std::string("activation region of goal ") + goal.label + " is unreachable");
    segments.push_back(path->length);
    from = path->waypoints.back();
  }
  return segments;
}

}  // namespace arena
