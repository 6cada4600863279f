#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "arena/error.hpp"
#include "arena/params.hpp"

using namespace arena;

TEST_CASE("defaults are valid and give ten physics steps per tick") {
  SimParams p;
  CHECK_NOTHROW(validate(p));
  CHECK(p.substeps() == 10);
}

TEST_CASE("field table covers every numeric parameter once") {
  const auto fields = param_fields();
  CHECK(fields.size() == 26);
  std::set<std::string_view> names;
  for (const auto& f : fields) names.insert(f.name);
  CHECK(names.size() == fields.size());
  CHECK(param_field("zeta_vx").is_integer());
  CHECK_FALSE(param_field("c_t").is_integer());
  CHECK_THROWS_AS(param_field("nope"), Error);
}

TEST_CASE("field get/set round trip") {
  SimParams p;
  double v = 0.25;
  for (const auto& f : param_fields()) {
    f.set(p, f.is_integer() ? 2.0 : v);
    CHECK(f.get(p) == doctest::Approx(f.is_integer() ? 2.0 : v));
    v += 0.5;
  }
}

TEST_CASE("json round trip is exact") {
  SimParams p;
  p.c_t = 0.123456789012345;
  p.zeta_vy = 3;
  p.anomaly_mode = AnomalyMode::kUniform;
  const auto j = to_json(p);
  CHECK(params_from_json(nlohmann::json::parse(j.dump())) == p);
  CHECK(j.begin().key() == "f_perp");
}

TEST_CASE("strict json parsing") {
  SUBCASE("unknown key") {
    try {
      params_from_json(nlohmann::json{{"c_tt", 0.3}});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfig);
    }
  }
  SUBCASE("wrong type") { CHECK_THROWS_AS(params_from_json(nlohmann::json{{"c_t", "x"}}), Error); }
  SUBCASE("fractional latency") {
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"zeta_vx", 1.5}}), Error);
  }
  SUBCASE("negative latency") {
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"zeta_vx", -1}}), Error);
  }
  SUBCASE("missing keys keep the base") {
    SimParams base;
    base.mass = 4.0;
    CHECK(params_from_json(nlohmann::json{{"kp", 1.0}}, base).mass == 4.0);
  }
}

TEST_CASE("validation rejects broken parameter sets") {
  SimParams p;
  p.mass = 0.0;
  CHECK_THROWS_AS(validate(p), Error);
  p = SimParams{};
  p.control_dt = 0.105;
  CHECK_THROWS_AS(validate(p), Error);
  p = SimParams{};
  p.sigma_l = -0.1;
  CHECK_THROWS_AS(validate(p), Error);
  p = SimParams{};
  p.mu_e = -0.01;
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("hash is stable and sensitive") {
  SimParams a, b;
  CHECK(params_hash(a) == params_hash(b));
  CHECK(params_hash(a).size() == 16);
  b.kd += 1e-12;
  CHECK(params_hash(a) != params_hash(b));
  // FNV-1a reference vectors
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("file round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "arena_params_test.json").string();
  SimParams p;
  p.f_par = 0.77;
  save_params(path, p);
  CHECK(load_params(path) == p);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_params(path), Error);
}
