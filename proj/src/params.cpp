#include "arena/params.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "arena/error.hpp"

namespace arena {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMalformedLog: return "malformed_log";
    case ErrorCode::kLayoutGeneration: return "layout_generation";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kInsufficientData: return "insufficient_data";
  }
  return "unknown";
}

std::string_view to_string(AnomalyMode mode) {
  switch (mode) {
    case AnomalyMode::kDropout: return "dropout";
    case AnomalyMode::kZero: return "zero";
    case AnomalyMode::kUniform: return "uniform";
  }
  return "dropout";
}

AnomalyMode anomaly_mode_from_string(std::string_view name) {
  if (name == "dropout") return AnomalyMode::kDropout;
  if (name == "zero") return AnomalyMode::kZero;
  if (name == "uniform") return AnomalyMode::kUniform;
  throw Error(ErrorCode::kConfig, "unknown anomaly_mode '" + std::string(name) + "'");
}

int SimParams::substeps() const {
  return static_cast<int>(std::lround(control_dt / physics_dt));
}

void validate(const SimParams& p) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfig, msg); };
  for (const auto& field : param_fields()) {
    const double v = field.get(p);
    if (!std::isfinite(v)) fail(std::string(field.name) + " must be finite");
    if (v < 0.0 && field.name != "mu_l" && field.name != "mu_e")
      fail(std::string(field.name) + " must be non-negative");
  }
  if (p.r_w <= 0.0) fail("r_w must be positive");
  if (p.mass <= 0.0) fail("mass must be positive");
  if (p.rho_w <= 0.0) fail("rho_w must be positive");
  if (p.h + p.w <= 0.0) fail("h + w must be positive");
  if (p.physics_dt <= 0.0) fail("physics_dt must be positive");
  if (p.control_dt <= 0.0) fail("control_dt must be positive");
  if (p.max_range <= 0.01) fail("max_range must exceed 0.01");
  const double ratio = p.control_dt / p.physics_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0)
    fail("control_dt must be an integer multiple of physics_dt");
}

namespace {

constexpr std::array<ParamField, 26> kFields{{
    {"f_perp", &SimParams::f_perp},
    {"f_par", &SimParams::f_par},
    {"c_t", &SimParams::c_t},
    {"mass", &SimParams::mass},
    {"rho_w", &SimParams::rho_w},
    {"r_w", &SimParams::r_w},
    {"h", &SimParams::h},
    {"w", &SimParams::w},
    {"omega_e", &SimParams::omega_e},
    {"kp", &SimParams::kp},
    {"ki", &SimParams::ki},
    {"kd", &SimParams::kd},
    {"max_current", &SimParams::max_current},
    {"max_wheel_speed", &SimParams::max_wheel_speed},
    {"zeta_vx", &SimParams::zeta_vx},
    {"zeta_vy", &SimParams::zeta_vy},
    {"zeta_vw", &SimParams::zeta_vw},
    {"zeta_s", &SimParams::zeta_s},
    {"mu_l", &SimParams::mu_l},
    {"sigma_l", &SimParams::sigma_l},
    {"lambda_anom", &SimParams::lambda_anom},
    {"max_range", &SimParams::max_range},
    {"mu_e", &SimParams::mu_e},
    {"sigma_e", &SimParams::sigma_e},
    {"physics_dt", &SimParams::physics_dt},
    {"control_dt", &SimParams::control_dt},
}};

}  // namespace

double ParamField::get(const SimParams& p) const {
  return std::visit([&](auto m) { return static_cast<double>(p.*m); }, member);
}

void ParamField::set(SimParams& p, double value) const {
  if (auto m = std::get_if<int SimParams::*>(&member)) {
    p.**m = static_cast<int>(std::lround(value));
  } else {
    p.*std::get<double SimParams::*>(member) = value;
  }
}

std::span<const ParamField> param_fields() { return kFields; }

const ParamField& param_field(std::string_view name) {
  for (const auto& f : param_fields())
    if (f.name == name) return f;
  throw Error(ErrorCode::kConfig, "unknown parameter '" + std::string(name) + "'");
}

nlohmann::ordered_json to_json(const SimParams& params) {
  nlohmann::ordered_json j;
  for (const auto& f : param_fields()) {
    if (f.is_integer())
      j[std::string(f.name)] = static_cast<int>(std::lround(f.get(params)));
    else
      j[std::string(f.name)] = f.get(params);
  }
  j["anomaly_mode"] = std::string(to_string(params.anomaly_mode));
  return j;
}

SimParams params_from_json(const nlohmann::json& j, const SimParams& base) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "parameter document must be an object");
  SimParams p = base;
  for (const auto& [key, value] : j.items()) {
    if (key == "anomaly_mode") {
      if (!value.is_string()) throw Error(ErrorCode::kConfig, "anomaly_mode must be a string");
      p.anomaly_mode = anomaly_mode_from_string(value.get<std::string>());
      continue;
    }
    const ParamField& field = param_field(key);
    if (field.is_integer()) {
      if (!value.is_number_integer() || value.get<long long>() < 0)
        throw Error(ErrorCode::kConfig, key + " must be a non-negative integer");
    } else if (!value.is_number()) {
      throw Error(ErrorCode::kConfig, key + " must be a number");
    }
    field.set(p, value.get<double>());
  }
  validate(p);
  return p;
}

SimParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open parameter file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return params_from_json(j);
}

void save_params(const std::string& path, const SimParams& params) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << to_json(params).dump(2) << '\n';
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << value;
  return os.str();
}

std::string params_hash(const SimParams& params) { return hex64(fnv1a64(to_json(params).dump())); }

}  // namespace arena
