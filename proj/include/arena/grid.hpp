#pragma once

#include <optional>
#include <vector>

#include "arena/world.hpp"

namespace arena {

/// 8-connected occupancy grid over the arena with obstacles inflated by the
/// robot radius. A cell is blocked when its centre is within `inflation` of a
/// wall, obstacle or goal block.
class OccupancyGrid {
 public:
  struct Cell {
    int col = 0;
    int row = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
  };

  OccupancyGrid(const ArenaLayout& layout, double inflation, double resolution = 0.05);

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  double resolution() const { return resolution_; }
  bool in_bounds(const Cell& c) const;
  bool blocked(const Cell& c) const;
  Cell cell_of(const Vec2& p) const;
  Vec2 center(const Cell& c) const;
  int index(const Cell& c) const { return c.row * cols_ + c.col; }
  Cell cell_at(int index) const { return {index % cols_, index / cols_}; }
  /// Nearest unblocked cell by breadth-first search.
  std::optional<Cell> nearest_free(const Cell& c) const;

 private:
  int cols_ = 0;
  int rows_ = 0;
  double resolution_ = 0.05;
  std::vector<unsigned char> blocked_;
};

/// Dijkstra over the grid from `sources`. Entry i holds the path length to
/// cell i, or +inf when unreachable. Diagonal moves cost sqrt(2) cells.
std::vector<double> grid_distances(const OccupancyGrid& grid,
                                   const std::vector<OccupancyGrid::Cell>& sources);

/// True when the straight segment keeps at least `radius` clearance.
bool segment_clear(const Vec2& a, const Vec2& b, const ArenaLayout& layout, double radius);

/// Shortest collision-free path length for a disc of `robot_radius`.
/// Straight segments with full clearance are measured exactly; otherwise the
/// 8-connected grid length (never below the Euclidean distance).
/// Throws Error(kUnreachable) when an endpoint is blocked or disconnected.
double shortest_path_length(const Vec2& start, const Vec2& goal, const ArenaLayout& layout,
                            double robot_radius);

struct GridPath {
  std::vector<Vec2> waypoints;  ///< cell centres from start to the reached cell
  double length = 0.0;
};

/// Path from `start` to the nearest free cell within `reach` of `target`.
/// A blocked start is snapped to the nearest free cell first.
std::optional<GridPath> plan_to_region(const OccupancyGrid& grid, const Vec2& start,
                                       const Vec2& target, double reach);

/// Multi-goal reference length: spawn to the activation region of each goal
/// in order, each segment starting where the previous one ended.
/// Throws Error(kUnreachable) when a region cannot be reached.
std::vector<double> activation_segments(const Pose2& spawn, const ArenaLayout& layout,
                                        double robot_radius, double reach);

}  // namespace arena
