#include "zmd/dynamics.hpp"

#include <fmt/format.h>

#include "zmd/error.hpp"

namespace zmd {

namespace {

RigidBodyState advance(const RigidBodyState& s, const StateDerivative& d, double h) {
  RigidBodyState out;
  out.p = s.p + h * d.p_dot;
  out.q = Quaternion::from_vec4(s.q.as_vec4() + h * d.q_dot);
  out.v = s.v + h * d.v_dot;
  out.omega = s.omega + h * d.omega_dot;
  return out;
}

}  // namespace

Wrench wrench_from_input(const PlatformModel& model, const Vector& u) {
  if (u.size() != model.rotor_count()) {
    throw Error(ErrorCode::dimension_mismatch,
                fmt::format("input has {} entries, platform has {} rotors", u.size(),
                            model.rotor_count()));
  }
  return {model.force * u, model.moment * u};
}

StateDerivative state_derivative(const PlatformModel& model, const RigidBodyState& state,
                                 const Wrench& wrench, double gravity) {
  StateDerivative d;
  d.p_dot = state.v;
  d.q_dot = qdot_body(state.q, state.omega);
  // R(q) is evaluated from the raw stage value; RK4 stages drift off the unit
  // sphere by O(h^2) which is well inside to_rotation's tolerance.
  const Mat3 s = skew(state.q.eps);
  const Mat3 r = Mat3::Identity() + 2.0 * state.q.eta * s + 2.0 * s * s;
  d.v_dot = -gravity * Vec3::UnitZ() + r * wrench.force / model.mass;
  const Vec3 jw = model.inertia * state.omega;
  d.omega_dot = model.inertia.ldlt().solve(-state.omega.cross(jw) + wrench.moment);
  return d;
}

StateDerivative state_derivative(const PlatformModel& model, const RigidBodyState& state,
                                 const Vector& u, double gravity) {
  return state_derivative(model, state, wrench_from_input(model, u), gravity);
}

RigidBodyState rk4_step(const PlatformModel& model, const RigidBodyState& state,
                        const Vector& u, double dt, double gravity) {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "rk4_step: dt must be positive");
  }
  const Wrench w = wrench_from_input(model, u);
  const StateDerivative k1 = state_derivative(model, state, w, gravity);
  const StateDerivative k2 = state_derivative(model, advance(state, k1, 0.5 * dt), w, gravity);
  const StateDerivative k3 = state_derivative(model, advance(state, k2, 0.5 * dt), w, gravity);
  const StateDerivative k4 = state_derivative(model, advance(state, k3, dt), w, gravity);

  StateDerivative sum;
  sum.p_dot = k1.p_dot + 2.0 * k2.p_dot + 2.0 * k3.p_dot + k4.p_dot;
  sum.q_dot = k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot;
  sum.v_dot = k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot;
  sum.omega_dot = k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot;

  RigidBodyState next = advance(state, sum, dt / 6.0);
  const bool finite = next.p.allFinite() && next.v.allFinite() && next.omega.allFinite() &&
                      next.q.as_vec4().allFinite();
  if (!finite || !(next.q.norm() > 0.0)) {
    throw Error(ErrorCode::integration_diverged, "rk4_step produced a non-finite state");
  }
  next.q = normalized(next.q);
  return next;
}

double rotational_kinetic_energy(const PlatformModel& model, const RigidBodyState& state) {
  return 0.5 * state.omega.dot(model.inertia * state.omega);
}

}  // namespace zmd
