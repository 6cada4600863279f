#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "arena/error.hpp"
#include "arena/grid.hpp"

using namespace arena;

namespace {

ArenaLayout walled_arena() {
  ArenaLayout a;
  // vertical wall from the floor up to y = 3.5 at x = 4
  a.obstacles.push_back({{{4.0, 1.75}, {0.1, 1.75}, 0.0}, HeightClass::kHigh});
  return a;
}

// Bellman-Ford relaxation over the same 8-connected graph (diagonals may not cut
// past a blocked cell): an algorithm-independent oracle.
std::vector<double> relax_oracle(const OccupancyGrid& g, OccupancyGrid::Cell src) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(static_cast<std::size_t>(g.cols() * g.rows()), inf);
  d[g.index(src)] = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int r = 0; r < g.rows(); ++r)
      for (int c = 0; c < g.cols(); ++c) {
        const OccupancyGrid::Cell cell{c, r};
        if (g.blocked(cell) || !std::isfinite(d[g.index(cell)])) continue;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            if (!dr && !dc) continue;
            const OccupancyGrid::Cell n{c + dc, r + dr};
            if (!g.in_bounds(n) || g.blocked(n)) continue;
            if (dr && dc && (g.blocked({c + dc, r}) || g.blocked({c, r + dr}))) continue;
            const double step = (dr && dc ? std::sqrt(2.0) : 1.0) * g.resolution();
            if (d[g.index(cell)] + step < d[g.index(n)] - 1e-12) {
              d[g.index(n)] = d[g.index(cell)] + step;
              changed = true;
            }
          }
      }
  }
  return d;
}

}  // namespace

TEST_CASE("straight line and zero length") {
  const ArenaLayout a;
  CHECK(shortest_path_length({1, 1}, {4, 1}, a, 0.2) == doctest::Approx(3.0));
  CHECK(shortest_path_length({2, 2}, {2, 2}, a, 0.2) == doctest::Approx(0.0));
}

TEST_CASE("grid distances match a relaxation oracle") {
  const ArenaLayout a = walled_arena();
  const OccupancyGrid g(a, 0.2, 0.1);
  const auto src = g.cell_of({1.0, 1.0});
  const auto got = grid_distances(g, {src});
  const auto want = relax_oracle(g, src);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (std::isinf(want[i])) CHECK(std::isinf(got[i]));
    else CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
  }
}

TEST_CASE("a wall forces a detour close to the grid optimum") {
  const ArenaLayout a = walled_arena();
  const double len = shortest_path_length({2, 1}, {6, 1}, a, 0.2);
  const OccupancyGrid g(a, 0.2);
  const auto oracle = relax_oracle(g, g.cell_of({2, 1}))[g.index(g.cell_of({6, 1}))];
  CHECK(std::abs(len - oracle) <= std::sqrt(2.0) * g.resolution() + 1e-9);
  // around the bare wall end from below, and the taut path over the inflated end from above
  const double lower = 2 * std::hypot(1.9, 2.5) + 0.2;
  const double taut = 2 * std::hypot(1.7, 2.7) + 0.6;
  CHECK(len >= lower);
  CHECK(len <= taut * 1.083);
}

TEST_CASE("path length is symmetric and at least Euclidean") {
  const ArenaLayout a = walled_arena();
  const std::vector<Vec2> pts{{1, 1}, {6, 1}, {7, 4}, {3, 4.5}, {5, 2}};
  for (const auto& p : pts)
    for (const auto& q : pts) {
      const double pq = shortest_path_length(p, q, a, 0.2);
      CHECK(pq >= (p - q).norm() - 1e-12);
      CHECK(pq == doctest::Approx(shortest_path_length(q, p, a, 0.2)).epsilon(1e-9));
    }
}

TEST_CASE("blocked and disconnected endpoints are unreachable") {
  const ArenaLayout a = walled_arena();
  try {
    shortest_path_length({4.0, 1.0}, {6, 1}, a, 0.2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnreachable);
  }
  ArenaLayout sealed = a;
  sealed.obstacles.push_back({{{4.0, 4.25}, {0.1, 0.75}, 0.0}, HeightClass::kHigh});
  CHECK_THROWS_AS(shortest_path_length({2, 1}, {6, 1}, sealed, 0.2), Error);
}

TEST_CASE("region planning stops inside the reach") {
  const ArenaLayout a = walled_arena();
  const OccupancyGrid g(a, 0.2);
  const auto path = plan_to_region(g, {2, 1}, {6, 1}, 0.8);
  REQUIRE(path.has_value());
  CHECK((path->waypoints.back() - Vec2(6, 1)).norm() <= 0.8 + 1e-9);
  CHECK(path->length > 0.0);
}

TEST_CASE("activation segments sum to a plausible reference length") {
  ArenaLayout a;
  for (int i = 0; i < 5; ++i) a.goals.push_back({static_cast<char>('A' + i), {1.5 + 1.2 * i, 2.5}, 0.0});
  const auto seg = activation_segments({0.5, 2.5, 0.0}, a, 0.2, 0.9);
  REQUIRE(seg.size() == 5);
  double sum = 0.0;
  for (double s : seg) {
    CHECK(s >= 0.0);
    sum += s;
  }
  // start 0.5, last goal 6.3, stop within 0.9 of it
  CHECK(sum >= 6.3 - 0.5 - 0.9 - 1e-9);
  CHECK(sum <= 6.3 - 0.5 + 0.1);
}
