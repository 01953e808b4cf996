#include <cmath>

#include <fmt/format.h>

#include "zmd/simkit.hpp"

namespace zmd {

namespace {

int ratio_or_throw(double a, double b, const char* what) {
  const double r = a / b;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-6 * n) {
    throw Error(ErrorCode::invalid_argument, fmt::format("{} must be an integer ratio", what));
  }
  return static_cast<int>(n);
}

}  // namespace

SimResult run_scenario(const HoverController& controller, const Scenario& sc) {
  if (!(sc.physics_dt > 0.0) || !(sc.duration >= 0.0) || sc.record_every < 1) {
    throw Error(ErrorCode::invalid_argument, "scenario timing parameters are invalid");
  }
  const int ctrl_every = ratio_or_throw(1.0 / sc.control_rate, sc.physics_dt,
                                        "control period / physics dt");
  const double dt_ctrl = ctrl_every * sc.physics_dt;
  const PlatformModel& model = controller.model();
  const Vec3& d_star = controller.artifacts().d_star;
  const int n = model.rotor_count();

  Rng rng(sc.seed);
  std::optional<DegradedSensor> sensor;
  if (sc.sensor) sensor.emplace(*sc.sensor);
  std::optional<RotorBank> rotors;
  if (sc.actuator) rotors.emplace(*sc.actuator, n);

  SimResult result;
  result.trace.rotor_count = n;
  const auto total_steps = static_cast<long long>(std::llround(sc.duration / sc.physics_dt));

  RigidBodyState state = sc.initial;
  std::optional<ControllerState> ctrl_state;
  ControlOutput last;
  double last_f = 0.0;
  try {
    for (long long k = 0; k < total_steps; ++k) {
      const double t = static_cast<double>(k) * sc.physics_dt;
      const RigidBodyState measured = sensor ? sensor->observe(t, state, rng) : state;
      if (k % ctrl_every == 0) {
        if (!ctrl_state) ctrl_state = controller.initial_state(measured);
        last_f = ctrl_state->f;
        auto [out, next] = controller.step(measured, sc.p_r, sc.q_r, dt_ctrl, *ctrl_state);
        last = std::move(out);
        ctrl_state = next;
      }

      Actuation act;
      if (rotors) {
        act = rotors->actuate(last.u, sc.physics_dt, rng);
      } else {
        act.u_effective = last.u;
        act.speeds = last.u.unaryExpr([](double u) { return commanded_speed(u); });
      }

      if (k % sc.record_every == 0) {
        TraceRecord rec;
        rec.t = t;
        rec.state = state;
        rec.e_p = state.p - sc.p_r;
        rec.rpy_delta = to_roll_pitch_yaw(product(inverse(ctrl_state->q_d), state.q));
        rec.f_delta = last.diag.f_delta;
        rec.f = last_f;
        rec.u = last.u;
        rec.speeds = act.speeds;
        rec.tau_r = last.diag.tau_r;
        if (last.diag.q_delta_ref) rec.reference_alignment = d_star.dot(last.diag.q_delta_ref->eps);
        result.trace.records.push_back(std::move(rec));
      }

      state = rk4_step(model, state, act.u_effective, sc.physics_dt, controller.gravity());
    }
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::thrust_singularity:
      case ErrorCode::controller_fault:
      case ErrorCode::integration_diverged:
        result.error = e.code();
        result.error_message = e.what();
        break;
      default:
        throw;
    }
  }
  return result;
}

}  // namespace zmd
