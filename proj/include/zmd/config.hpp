#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "zmd/controller.hpp"
#include "zmd/platform.hpp"
#include "zmd/simkit.hpp"

namespace zmd {

enum class SimMode { ideal, realistic };

/// A parsed scenario file. Angles are degrees in JSON and radians here.
struct ScenarioConfig {
  PlatformModel platform;
  Gains gains;
  Scenario scenario;
  SimMode mode = SimMode::ideal;
  double gravity = kStandardGravity;
  std::optional<std::filesystem::path> output;
};

/// Platform JSON:
///   { "mass": kg, "inertia": [9 values, row-major, kg m^2],
///     "rotors": [ { "position": [m], "axis": [unit], "c_f", "c_tau_plus", "sigma" }
///               | { "gamma", "alpha", "beta" (deg), "ell" (m), "c_f", "c_tau_plus", "sigma" } ] }
/// Throws Error(config_error) on malformed input.
PlatformModel parse_platform(const std::string& json_text);
PlatformModel load_platform_file(const std::filesystem::path& path);

/// Scenario JSON; "platform" is either an inline object or a path relative to
/// the scenario file. See README for the field list.
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::filesystem::path& base_dir = ".");
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

}  // namespace zmd
