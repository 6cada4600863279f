#include <doctest.h>

#include <cmath>

#include "arena/error.hpp"
#include "arena/gat.hpp"
#include "arena/sim2real.hpp"
#include "log_builder.hpp"

using namespace arena;
using namespace arena::testing;

namespace {

std::vector<TrajectoryLog> sim_logs(int count, int ticks, const SimParams& p = {}) {
  std::vector<TrajectoryLog> logs;
  for (int i = 0; i < count; ++i)
    logs.push_back(replay(command_log(random_commands(100 + static_cast<std::uint64_t>(i), ticks, 3)), p));
  return logs;
}

}  // namespace

TEST_CASE("transitions chain the velocity columns") {
  const auto logs = sim_logs(2, 30);
  const auto tr = extract_transitions(logs);
  REQUIRE(tr.size() == 60);
  CHECK(tr[0].state.isZero());
  CHECK(tr[1].state == tr[0].next);
  CHECK(tr[30].state.isZero());
  CHECK(tr[5].action[0] == logs[0].records[5].cmd[0]);
}

TEST_CASE("too little data") {
  const auto logs = sim_logs(1, 99);
  try {
    gat_fit(logs, SimParams{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientData);
  }
  CHECK_THROWS_AS(gat_fit(std::span<const TrajectoryLog>{}, SimParams{}), Error);
}

TEST_CASE("identity transformer only clamps") {
  const auto id = ActionTransformer::identity(1.0, 2.0);
  CHECK(id.is_identity());
  const ControlCommand in{0.3, -0.2, 0.5, true};
  CHECK(gat_transform(id, Eigen::Vector3d::Zero(), in) == in);
  const ControlCommand wild{3.0, -4.0, 9.0, false};
  const ControlCommand out = gat_transform(id, Eigen::Vector3d::Zero(), wild);
  CHECK(out.u_x == 1.0);
  CHECK(out.u_y == -1.0);
  CHECK(out.u_w == 2.0);
  CHECK_THROWS_AS(id.simulate(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()), Error);
}

TEST_CASE("self-transfer is close to the identity") {
  const auto logs = sim_logs(4, 100);
  GatOptions o;
  o.max_speed = 1.0;
  o.max_yaw_rate = 1.5;
  const auto t = gat_fit(logs, SimParams{}, o);
  CHECK(t.training_size() == 400);
  const auto held = extract_transitions(sim_logs(1, 60));
  double corr = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < held.size(); i += 2) {
    const auto& h = held[i];
    const ControlCommand a{h.action[0], h.action[1], h.action[2], false};
    const ControlCommand g = t.transform(h.state, a);
    corr += std::abs(g.u_x - a.u_x) / 2.0 + std::abs(g.u_y - a.u_y) / 2.0 + std::abs(g.u_w - a.u_w) / 3.0;
    n += 3;
    CHECK(std::abs(g.u_x) <= 1.0);
    CHECK(std::abs(g.u_w) <= 1.5);
  }
  CHECK(corr / n < 0.05);
}

TEST_CASE("transform is deterministic and the inverse model inverts the simulator") {
  const auto logs = sim_logs(2, 80);
  const auto t = gat_fit(logs, SimParams{});
  const Eigen::Vector3d s(0.3, -0.1, 0.2);
  const ControlCommand a{0.5, 0.2, -0.4, false};
  CHECK(t.transform(s, a) == t.transform(s, a));
  const Eigen::Vector3d act(0.4, -0.3, 0.6);
  const Eigen::Vector3d target = t.simulate(s, act);
  const Eigen::Vector3d found = t.inverse(s, target, Eigen::Vector3d::Zero());
  CHECK((t.simulate(s, found) - target).norm() < 1e-2);
  CHECK(t.residual_rms().allFinite());
}
