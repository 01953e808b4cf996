#include "zmd/config.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "zmd/error.hpp"

namespace zmd {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::config_error, msg); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(fmt::format("missing field '{}'", key));
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) fail(fmt::format("field '{}' must be a number", key));
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

Vec3 vec3(const json& v, const char* key) {
  if (!v.is_array() || v.size() != 3) fail(fmt::format("field '{}' must be an array of 3", key));
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) fail(fmt::format("'{}' must be numeric", key));
    out(i) = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

Vec3 vec3_or(const json& j, const char* key, const Vec3& fallback) {
  return j.contains(key) ? vec3(j.at(key), key) : fallback;
}

// { "angle_deg": a, "axis": [x, y, z] }; the axis is normalized.
Quaternion attitude(const json& j, const char* key) {
  const double angle = number(j, "angle_deg") * kDeg;
  const Vec3 axis = vec3(field(j, "axis"), "axis");
  if (!(axis.norm() > 0.0)) fail(fmt::format("'{}' axis must be non-zero", key));
  return from_axis_angle(angle, axis.normalized());
}

RotorSpec parse_rotor(const json& r, std::size_t index) {
  const double c_f = number(r, "c_f");
  const double c_tau_plus = number(r, "c_tau_plus");
  const json& sig = field(r, "sigma");
  if (!sig.is_number_integer()) fail(fmt::format("rotor {}: sigma must be +1 or -1", index + 1));
  const int sigma = sig.get<int>();
  if (r.contains("position") || r.contains("axis")) {
    RotorSpec spec;
    spec.position = vec3(field(r, "position"), "position");
    const Vec3 axis = vec3(field(r, "axis"), "axis");
    if (!(axis.norm() > 0.0)) fail(fmt::format("rotor {}: zero axis", index + 1));
    spec.axis = axis.normalized();
    spec.c_f = c_f;
    spec.c_tau_plus = c_tau_plus;
    spec.sigma = sigma;
    return spec;
  }
  return tilted_rotor(number(r, "gamma") * kDeg, number(r, "alpha") * kDeg,
                      number(r, "beta") * kDeg, number(r, "ell"), c_f, c_tau_plus, sigma);
}

PlatformModel platform_from_json(const json& j) {
  const double mass = number(j, "mass");
  const json& inertia = field(j, "inertia");
  if (!inertia.is_array() || inertia.size() != 9) fail("'inertia' must be 9 numbers (row-major)");
  Mat3 jm;
  for (int i = 0; i < 9; ++i) {
    const json& v = inertia[static_cast<std::size_t>(i)];
    if (!v.is_number()) fail("'inertia' must be numeric");
    jm(i / 3, i % 3) = v.get<double>();
  }
  const json& rotors = field(j, "rotors");
  if (!rotors.is_array()) fail("'rotors' must be an array");
  std::vector<RotorSpec> specs;
  for (std::size_t i = 0; i < rotors.size(); ++i) specs.push_back(parse_rotor(rotors[i], i));
  return make_platform(mass, jm, std::move(specs));
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(fmt::format("JSON parse error: {}", e.what()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(fmt::format("cannot open '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SensorModel sensor_from_json(const json& j) {
  SensorModel s;
  if (j.is_null()) return s;
  s.std_p = number_or(j, "std_p", s.std_p);
  s.std_v = number_or(j, "std_v", s.std_v);
  s.std_q = number_or(j, "std_q", s.std_q);
  s.std_omega = number_or(j, "std_omega", s.std_omega);
  s.delay = number_or(j, "delay", s.delay);
  s.sensor_rate = number_or(j, "sensor_rate", s.sensor_rate);
  s.validate();
  return s;
}

ActuatorModel actuator_from_json(const json& j) {
  ActuatorModel a;
  if (j.is_null()) return a;
  a.speed_min = number_or(j, "speed_min", a.speed_min);
  a.speed_max = number_or(j, "speed_max", a.speed_max);
  a.quant_bits = static_cast<int>(number_or(j, "quant_bits", a.quant_bits));
  a.motor_time_constant = number_or(j, "motor_time_constant", a.motor_time_constant);
  a.speed_noise_coeff = number_or(j, "speed_noise_coeff", a.speed_noise_coeff);
  a.validate();
  return a;
}

}  // namespace

PlatformModel parse_platform(const std::string& json_text) {
  try {
    return platform_from_json(parse_json(json_text));
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

PlatformModel load_platform_file(const std::filesystem::path& path) {
  return parse_platform(read_file(path));
}

ScenarioConfig parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  const json j = parse_json(json_text);
  try {
    ScenarioConfig cfg;
    const json& plat = field(j, "platform");
    if (plat.is_string()) {
      cfg.platform = load_platform_file(base_dir / plat.get<std::string>());
    } else {
      cfg.platform = platform_from_json(plat);
    }

    const json& g = field(j, "gains");
    cfg.gains.k_pp = number(g, "k_pp");
    cfg.gains.k_pd = number(g, "k_pd");
    cfg.gains.k_delta = number(g, "k_delta");
    cfg.gains.k_ap = number(g, "k_ap");
    cfg.gains.k_ad = number(g, "k_ad");
    cfg.gains.k_q = number_or(g, "k_q", 0.0);
    cfg.gains.validate();

    Scenario& sc = cfg.scenario;
    sc.p_r = vec3_or(j, "p_r", Vec3::Zero());
    if (j.contains("q_r") && !j.at("q_r").is_null()) sc.q_r = attitude(j.at("q_r"), "q_r");
    if (j.contains("initial_state")) {
      const json& is = j.at("initial_state");
      sc.initial.p = vec3_or(is, "p", Vec3::Zero());
      sc.initial.v = vec3_or(is, "v", Vec3::Zero());
      sc.initial.omega = vec3_or(is, "omega", Vec3::Zero());
      if (is.contains("attitude")) sc.initial.q = attitude(is.at("attitude"), "attitude");
    }
    sc.duration = number(j, "duration");
    if (!(sc.duration >= 0.0)) fail("'duration' must be >= 0");
    sc.physics_dt = number_or(j, "physics_dt", sc.physics_dt);
    sc.control_rate = number_or(j, "control_rate", sc.control_rate);
    sc.record_every = static_cast<int>(number_or(j, "record_every", sc.record_every));
    if (j.contains("seed")) {
      const json& s = j.at("seed");
      if (!s.is_number_integer()) fail("'seed' must be an integer");
      sc.seed = s.get<std::uint64_t>();
    }
    cfg.gravity = number_or(j, "gravity", kStandardGravity);

    const std::string mode = j.value("mode", std::string("ideal"));
    if (mode == "ideal") {
      cfg.mode = SimMode::ideal;
    } else if (mode == "realistic") {
      cfg.mode = SimMode::realistic;
      sc.sensor = sensor_from_json(j.value("sensor", json()));
      sc.actuator = actuator_from_json(j.value("actuator", json()));
    } else {
      fail(fmt::format("unknown mode '{}'", mode));
    }
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    return cfg;
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace zmd
