#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "arena/dynamics.hpp"

using namespace arena;

namespace {

constexpr double kPi = std::numbers::pi;

// Branch expressions of the roller friction tables, copied symbol for symbol.
double table_a(int branch, double t, double fp, double fs) {
  const double s = std::sin(t - kPi / 4), c = std::cos(t - kPi / 4);
  switch (branch) {
    case 0: return -fp * s + fs * c;
    case 1: return fp * s + fs * c;
    case 2: return fp * s - fs * c;
    default: return -fp * s - fs * c;
  }
}

double table_b(int branch, double t, double fp, double fs) {
  const double s = std::sin(t - kPi / 4), c = std::cos(t - kPi / 4);
  switch (branch) {
    case 0: return fp * c - fs * s;
    case 1: return fp * c + fs * s;
    case 2: return -fp * c + fs * s;
    default: return -fp * c - fs * s;
  }
}

}  // namespace

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), w = wrap_angle(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(std::remainder(a - w, 2 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("friction angle normalization and branch selection") {
  CHECK(normalize_friction_angle(-kPi / 4) == doctest::Approx(-kPi / 4));
  CHECK(normalize_friction_angle(7 * kPi / 4) == doctest::Approx(-kPi / 4));
  CHECK(normalize_friction_angle(-kPi / 2) == doctest::Approx(3 * kPi / 2));
  CHECK(friction_branch(0.0) == 0);
  CHECK(friction_branch(kPi / 4) == 1);  // lower-inclusive
  CHECK(friction_branch(kPi / 2) == 1);
  CHECK(friction_branch(kPi) == 2);
  CHECK(friction_branch(3 * kPi / 2) == 3);
  CHECK(friction_branch(-0.1) == 0);
  CHECK(friction_branch(-kPi / 2) == 3);
}

TEST_CASE("dynamic friction equals the printed tables") {
  const double fp = 0.7, fs = 0.4;
  for (int k = 0; k < 64; ++k) {
    const double t = -kPi / 4 + (k + 0.5) * (2 * kPi / 64);
    const int branch = static_cast<int>(std::floor((t + kPi / 4) / (kPi / 2)));
    CHECK(dynamic_friction(0, t, fp, fs) == doctest::Approx(table_a(branch, t, fp, fs)));
    CHECK(dynamic_friction(2, t, fp, fs) == doctest::Approx(table_a(branch, t, fp, fs)));
    CHECK(dynamic_friction(1, t, fp, fs) == doctest::Approx(table_b(branch, t, fp, fs)));
    CHECK(dynamic_friction(3, t, fp, fs) == doctest::Approx(table_b(branch, t, fp, fs)));
  }
}

TEST_CASE("friction tables are continuous and non-negative") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> f(0.05, 2.0), ang(-10, 10);
  for (int i = 0; i < 500; ++i) {
    const double fp = f(rng), fs = f(rng), t = ang(rng);
    for (int wheel = 0; wheel < 4; ++wheel) CHECK(dynamic_friction(wheel, t, fp, fs) >= -1e-12);
  }
  for (const double b : {kPi / 4, 3 * kPi / 4, 5 * kPi / 4}) {
    const int right = friction_branch(b);
    for (int wheel = 0; wheel < 2; ++wheel) {
      const double lo = dynamic_friction_branch(wheel, right - 1, b, 0.9, 0.3);
      const double hi = dynamic_friction_branch(wheel, right, b, 0.9, 0.3);
      CHECK(std::abs(lo - hi) < 1e-12);
    }
  }
}

TEST_CASE("friction force: static and dynamic branches") {
  SimParams p;
  CHECK(friction_force(0, 0.3, 0.2, 2.0, p) == doctest::Approx(p.c_t * 2.0));
  CHECK(friction_force(0, 0.3, p.omega_e, -1.0, p) == doctest::Approx(-p.c_t));
  const double fd = dynamic_friction(1, 0.3, p.f_perp, p.f_par);
  CHECK(friction_force(1, 0.3, 5.0, 2.0, p) == doctest::Approx(fd));
  CHECK(friction_force(1, 0.3, -5.0, 2.0, p) == doctest::Approx(-fd));
}

TEST_CASE("PID current") {
  SimParams p;
  p.kp = 2.0;
  p.ki = 0.5;
  p.kd = 0.001;
  const double dt = 0.01;
  WheelState w;
  const double i1 = pid_current(1.0, w, 0, p, dt);
  CHECK(i1 == doctest::Approx(2.0 * 1.0 + 0.5 * 0.01 + 0.001 * 1.0 / dt));
  CHECK(w.integral_err[0] == doctest::Approx(0.01));
  CHECK(w.prev_err[0] == doctest::Approx(1.0));
  CHECK(w.integral_err[1] == 0.0);

  SUBCASE("pure proportional") {
    SimParams q;
    q.kp = 1.0;
    q.ki = q.kd = 0.0;
    WheelState s;
    CHECK(pid_current(2.0, s, 1, q, 0.1) == doctest::Approx(2.0));
  }
  SUBCASE("integral accumulation") {
    SimParams q;
    q.kp = q.kd = 0.0;
    q.ki = 1.0;
    WheelState s;
    CHECK(pid_current(1.0, s, 1, q, 0.1) == doctest::Approx(0.1));
    CHECK(pid_current(1.0, s, 1, q, 0.1) == doctest::Approx(0.2));
  }
  SUBCASE("no error, no current") {
    WheelState s;
    CHECK(pid_current(0.0, s, 3, p, dt) == 0.0);
  }
  SUBCASE("saturation clamps and freezes the integral") {
    WheelState s;
    s.prev_err[2] = 100.0;
    s.integral_err[2] = 0.3;
    const double out = pid_current(100.0, s, 2, p, dt);
    CHECK(out == doctest::Approx(p.max_current));
    CHECK(s.integral_err[2] == doctest::Approx(0.3));
    const double neg = pid_current(-100.0, s, 2, p, dt);
    CHECK(neg == doctest::Approx(-p.max_current));
  }
}

TEST_CASE("wheel update follows the motor equation") {
  SimParams p;
  WheelState w;
  w.omega << 0.1, 3.0, -3.0, 0.0;
  const Eigen::Vector4d currents(1.0, 2.0, -0.5, 0.0);
  const Eigen::Vector4d theta(0.1, 1.0, 2.0, 4.0);
  const WheelState next = wheel_update(w, currents, theta, p, 0.01);
  for (int i = 0; i < 4; ++i) {
    const double f = std::abs(w.omega[i]) <= p.omega_e
                         ? p.c_t * currents[i]
                         : std::copysign(dynamic_friction(i, theta[i], p.f_perp, p.f_par), w.omega[i]);
    const double expected = w.omega[i] + 0.01 * (p.c_t * currents[i] - 4 * f * p.r_w / p.mass) / p.rho_w;
    CHECK(next.omega[i] == doctest::Approx(expected));
  }
  const WheelState free = wheel_update(w, currents, theta, p, 0.01, FrictionModel::kNone);
  CHECK(free.omega[1] == doctest::Approx(3.0 + 0.01 * p.c_t * 2.0 / p.rho_w));

  SUBCASE("speed clamp") {
    WheelState fast;
    fast.omega.setConstant(99.9);
    const WheelState n = wheel_update(fast, Eigen::Vector4d::Constant(10.0), theta, p, 0.01,
                                      FrictionModel::kNone);
    CHECK(n.omega.maxCoeff() == doctest::Approx(p.max_wheel_speed));
  }
}

TEST_CASE("contact directions") {
  SimParams p;
  const Eigen::Vector4d fwd = contact_directions({1.0, 0.0, 0.0}, p);
  for (int i = 0; i < 4; ++i) CHECK(fwd[i] == doctest::Approx(0.0));
  const Eigen::Vector4d left = contact_directions({0.0, 1.0, 0.0}, p);
  for (int i = 0; i < 4; ++i) CHECK(left[i] == doctest::Approx(kPi / 2));
  // pure rotation: right-front contact (h/2, -w/2) moves along (w/2, h/2)
  const Eigen::Vector4d spin = contact_directions({0.0, 0.0, 1.0}, p);
  CHECK(spin[0] == doctest::Approx(std::atan2(p.h / 2, p.w / 2)));
  CHECK(contact_directions({0.0, 0.0, 0.0}, p).isZero());
}

TEST_CASE("latency queue delays each channel independently") {
  SimParams p;
  p.zeta_vx = 2;
  p.zeta_vw = 1;
  LatencyQueue q(p);
  const ControlCommand a{1.0, 2.0, 3.0, true};
  const ControlCommand b{4.0, 5.0, 6.0, false};
  const ControlCommand out1 = q.apply(a);
  CHECK(out1.u_x == 0.0);
  CHECK(out1.u_y == 2.0);
  CHECK(out1.u_w == 0.0);
  CHECK(out1.fire);
  const ControlCommand out2 = q.apply(b);
  CHECK(out2.u_x == 0.0);
  CHECK(out2.u_w == 3.0);
  const ControlCommand out3 = q.apply(b);
  CHECK(out3.u_x == 1.0);
  CHECK(out3.u_w == 6.0);
  q.prime(b);
  CHECK(q.apply(a).u_x == 4.0);
}

TEST_CASE("engine tracks a constant command") {
  SimParams p;
  Engine e(p);
  e.reset({});
  for (int k = 0; k < 50; ++k) e.step_control({0.5, 0.0, 0.0, false});
  CHECK(e.body().v_x == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(e.body().v_y) < 1e-6);
  CHECK(e.body().x > 2.0);
  CHECK(e.body().x < 2.5);
}

TEST_CASE("pose update uses the new velocity") {
  SimParams p;
  BodyState b;
  b.theta = kPi / 2;
  WheelState w;
  w.omega.setConstant(10.0);
  const auto [nb, nw] = step_physics(b, w, ControlCommand{0.5, 0, 0, false}, p, FrictionModel::kNone);
  const Eigen::Vector3d v = body_velocity(nw, p);
  CHECK(nb.v_x == doctest::Approx(v.x()));
  CHECK(nb.y == doctest::Approx(p.physics_dt * v.x()));
  CHECK(std::abs(nb.x) < 1e-12);
}

TEST_CASE("friction changes the response") {
  SimParams p;
  p.f_perp = p.f_par = 2.0;
  Engine full(p, FrictionModel::kFull), none(p, FrictionModel::kNone);
  full.reset({});
  none.reset({});
  double max_gap = 0.0;
  for (int k = 0; k < 30; ++k) {
    const ControlCommand c{k < 15 ? 0.5 : -0.5, 0, 0, false};
    full.step_control(c);
    none.step_control(c);
    max_gap = std::max(max_gap, std::abs(full.body().v_x - none.body().v_x));
  }
  CHECK(max_gap > 0.01);
}

TEST_CASE("worked examples") {
  SimParams p;
  // right-front wheel, unit coefficients
  CHECK(dynamic_friction(0, kPi / 4, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(dynamic_friction(0, 0.0, 1.0, 1.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(friction_force(0, 0.0, 0.0, 2.0, p) == doctest::Approx(0.6));

  const Eigen::Vector4d spin = inverse_kinematics({0.0, 0.0, 1.0, false}, p);
  CHECK(spin[0] == doctest::Approx(-4.0));
  CHECK(spin[1] == doctest::Approx(4.0));
  CHECK(spin[2] == doctest::Approx(-4.0));
  CHECK(spin[3] == doctest::Approx(4.0));
  WheelState ten;
  ten.omega.setConstant(10.0);
  const Eigen::Vector3d v = body_velocity(ten, p);
  CHECK(v.x() == doctest::Approx(0.5));
  CHECK(std::abs(v.y()) < 1e-15);

  WheelState rest;
  const WheelState same = wheel_update(rest, Eigen::Vector4d::Zero(), Eigen::Vector4d::Zero(), p, 0.01);
  CHECK(same.omega.isZero());
  const WheelState kicked = wheel_update(rest, Eigen::Vector4d::Constant(1.0), Eigen::Vector4d::Zero(),
                                         p, 0.01, FrictionModel::kNone);
  CHECK(kicked.omega[0] == doctest::Approx(0.3));

  SimParams lag;
  lag.zeta_s = 1;
  LatencyQueue q(lag);
  CHECK_FALSE(q.apply({0, 0, 0, true}).fire);
  CHECK(q.apply({0, 0, 0, false}).fire);
}

TEST_CASE("rest is a fixed point and zero latency is transparent") {
  SimParams p;
  Engine e(p);
  e.reset({1.0, 2.0, 0.5, 0, 0, 0});
  for (int k = 0; k < 20; ++k) e.step_control({});
  CHECK(e.body() == BodyState{1.0, 2.0, 0.5, 0, 0, 0});

  Engine a(p), b(p);
  a.reset({});
  b.reset({});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) {
    const ControlCommand c{u(rng), u(rng), u(rng), false};
    a.step_control(c);
    for (int s = 0; s < p.substeps(); ++s) b.step_physics(c);
  }
  CHECK(a.body() == b.body());
  CHECK(a.wheels() == b.wheels());
}

TEST_CASE("wheel speeds stay bounded over a million steps") {
  SimParams p;
  WheelState w;
  BodyState b;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-3, 3);
  ControlCommand c;
  for (int k = 0; k < 1000000; ++k) {
    if (k % 1000 == 0) c = {u(rng), u(rng), u(rng), false};
    std::tie(b, w) = step_physics(b, w, c, p);
  }
  CHECK(w.omega.allFinite());
  CHECK(w.omega.cwiseAbs().maxCoeff() <= p.max_wheel_speed);
  CHECK(std::isfinite(b.x));
}
