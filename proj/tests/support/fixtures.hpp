#pragma once

#include <vector>

#include "zmd/platform.hpp"

namespace zmd::testing {

inline constexpr double kCf = 9.9e-4;
inline constexpr double kCtau = 1.9e-5;

/// Plus-configuration quadrotor, all spin axes along e3.
inline PlatformModel coplanar_quadrotor(double arm = 0.25) {
  std::vector<RotorSpec> rotors;
  const Vec3 pos[4] = {{arm, 0, 0}, {0, arm, 0}, {-arm, 0, 0}, {0, -arm, 0}};
  for (int i = 0; i < 4; ++i) {
    rotors.push_back({pos[i], Vec3::UnitZ(), kCf, kCtau, i % 2 == 0 ? 1 : -1});
  }
  return make_platform(1.0, Vec3(0.01, 0.01, 0.02).asDiagonal(), rotors);
}

/// Four rotors on the body x axis: rk(M) = 2.
inline PlatformModel collinear_platform() {
  std::vector<RotorSpec> rotors;
  const double xs[4] = {0.2, -0.2, 0.4, -0.4};
  for (int i = 0; i < 4; ++i) {
    rotors.push_back({Vec3(xs[i], 0, 0), Vec3::UnitZ(), kCf, kCtau, i % 2 == 0 ? 1 : -1});
  }
  return make_platform(1.0, Vec3(0.01, 0.01, 0.02).asDiagonal(), rotors);
}

inline PlatformModel default_hexarotor() { return hexarotor_factory(default_hexarotor_params()); }

}  // namespace zmd::testing
