#pragma once

#include "zmd/platform.hpp"
#include "zmd/quat.hpp"

namespace zmd {

inline constexpr double kStandardGravity = 9.81;  // m/s^2

/// Pose and twist of the airframe. `q` maps body to world; `omega` is in body.
struct RigidBodyState {
  Vec3 p = Vec3::Zero();
  Quaternion q;
  Vec3 v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

struct StateDerivative {
  Vec3 p_dot = Vec3::Zero();
  Vec4 q_dot = Vec4::Zero();
  Vec3 v_dot = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();
};

/// Body-frame control force and moment.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};

Wrench wrench_from_input(const PlatformModel& model, const Vector& u);

/// Newton-Euler equations with rotor inputs held at `u`.
StateDerivative state_derivative(const PlatformModel& model, const RigidBodyState& state,
                                 const Vector& u, double gravity = kStandardGravity);

/// Same equations driven by an already computed body wrench.
StateDerivative state_derivative(const PlatformModel& model, const RigidBodyState& state,
                                 const Wrench& wrench, double gravity = kStandardGravity);

/// Classic RK4 step with `u` constant over the step, quaternion renormalized
/// afterwards. Throws integration_diverged on non-finite results.
RigidBodyState rk4_step(const PlatformModel& model, const RigidBodyState& state,
                        const Vector& u, double dt, double gravity = kStandardGravity);

double rotational_kinetic_energy(const PlatformModel& model, const RigidBodyState& state);

}  // namespace zmd
