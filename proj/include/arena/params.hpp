#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

namespace arena {

enum class AnomalyMode { kDropout, kZero, kUniform };

std::string_view to_string(AnomalyMode mode);
AnomalyMode anomaly_mode_from_string(std::string_view name);

/// Every tunable physical, controller, latency and sensor parameter of the
/// simulator. Defaults are placeholders meant to be calibrated.
///
/// Friction naming follows the wheel model: `f_par` is the sliding component
/// along the roller, `f_perp` the rolling component.
struct SimParams {
  // Friction and motor.
  double f_perp = 0.5;
  double f_par = 0.5;
  double c_t = 0.3;
  double mass = 3.3;
  double rho_w = 0.01;
  double r_w = 0.05;
  double h = 0.2;
  double w = 0.2;
  double omega_e = 0.5;

  // Wheel speed PID.
  double kp = 0.8;
  double ki = 0.1;
  double kd = 0.01;
  double max_current = 10.0;
  double max_wheel_speed = 100.0;

  // Per-channel control latency, in control ticks.
  int zeta_vx = 0;
  int zeta_vy = 0;
  int zeta_vw = 0;
  int zeta_s = 0;

  // LiDAR.
  double mu_l = 0.0;
  double sigma_l = 0.01;
  double lambda_anom = 0.5;
  double max_range = 12.0;
  AnomalyMode anomaly_mode = AnomalyMode::kDropout;

  // Wheel encoders.
  double mu_e = 0.0;
  double sigma_e = 0.02;

  double physics_dt = 0.01;
  double control_dt = 0.1;

  /// Physics steps per control tick.
  int substeps() const;

  friend bool operator==(const SimParams&, const SimParams&) = default;
};

/// Throws Error(kConfig) describing the first violated invariant.
void validate(const SimParams& params);

/// Reflection entry for one numeric SimParams field.
struct ParamField {
  std::string_view name;
  std::variant<double SimParams::*, int SimParams::*> member;

  double get(const SimParams& p) const;
  void set(SimParams& p, double value) const;
  bool is_integer() const { return std::holds_alternative<int SimParams::*>(member); }
};

/// All numeric fields, in canonical (serialization) order.
std::span<const ParamField> param_fields();

/// Looks up a numeric field by name; throws Error(kConfig) when unknown.
const ParamField& param_field(std::string_view name);

nlohmann::ordered_json to_json(const SimParams& params);

/// Strict parse: unknown keys and wrong value types are errors. Keys absent
/// from `j` keep the values of `base`.
SimParams params_from_json(const nlohmann::json& j, const SimParams& base = {});

SimParams load_params(const std::string& path);
void save_params(const std::string& path, const SimParams& params);

/// FNV-1a 64-bit.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Stable digest of the canonical JSON form.
std::string params_hash(const SimParams& params);

}  // namespace arena
