#include <cmath>
#include <numbers>

#include <doctest.h>

#include "support/closed_loop.hpp"
#include "support/fixtures.hpp"
#include "support/properties.hpp"
#include "support/random.hpp"
#include "zmd/controller.hpp"
#include "zmd/error.hpp"

using namespace zmd;
using namespace zmd::testing;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

HoverController make_controller(const PlatformModel& model, Gains gains = {}) {
  return HoverController(model, analyze_allocation(model), gains);
}

RigidBodyState offset_state() {
  RigidBodyState s;
  s.p = Vec3(1.0, 0.0, 0.0);
  s.q = from_axis_angle(20 * kDeg, Vec3(1, 1, 0).normalized());
  return s;
}

}  // namespace

TEST_CASE("compute_f_r") {
  const double mg = 1.5 * kStandardGravity;
  Gains g;
  g.k_pp = 2.0;
  CHECK((compute_f_r(Vec3::Zero(), Vec3::Zero(), g, 1.5) - mg * Vec3::UnitZ()).norm() == 0.0);
  CHECK((compute_f_r(Vec3::UnitX(), Vec3::Zero(), g, 1.5) - (mg * Vec3::UnitZ() - 2.0 * Vec3::UnitX()))
            .norm() < 1e-15);
  Sampler s(21);
  const Vec3 base = compute_f_r(Vec3::Zero(), Vec3::Zero(), g, 1.5);
  for (int i = 0; i < 50; ++i) {
    const Vec3 a = s.vec3(), b = s.vec3(), c = s.vec3(), e = s.vec3();
    const Vec3 lhs = compute_f_r(a + c, b + e, g, 1.5) - base;
    const Vec3 rhs = (compute_f_r(a, b, g, 1.5) - base) + (compute_f_r(c, e, g, 1.5) - base);
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("compute_f_delta") {
  const PlatformModel hexa = default_hexarotor();
  const Vec3 d = analyze_allocation(hexa).d_star;
  const double mg = kStandardGravity;
  const Quaternion q_d = aligning_attitude(d, 0.7);
  CHECK((to_rotation(q_d) * d - Vec3::UnitZ()).norm() < 1e-14);
  CHECK(compute_f_delta(q_d, d, mg, mg * Vec3::UnitZ()).norm() < 1e-13);

  Sampler s(22);
  for (int i = 0; i < 50; ++i) {
    const Quaternion q = s.unit_quaternion();
    const Vec3 f_r = s.vec3(10);
    CHECK((compute_f_delta(q, d, 0.0, f_r) + f_r).norm() == 0.0);
    const double f = s.uniform(-20, 20);
    CHECK(std::abs((compute_f_delta(q, d, f, f_r) + f_r).norm() - std::abs(f)) < 1e-12);
  }
}

TEST_CASE("compute_nu") {
  Gains g;
  CHECK(compute_nu(Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), g, 1.0).norm() == 0.0);
  g.k_pp = 1.0;
  g.k_pd = 1.0;
  CHECK((compute_nu(Vec3::UnitX(), Vec3::Zero(), Vec3::Zero(), g, 1.0) - Vec3::UnitX()).norm() == 0.0);
  g = Gains{};
  const double m = 1.3;
  Sampler s(23);
  for (int i = 0; i < 20; ++i) {
    const Vec3 a = s.vec3(), b = s.vec3(), c = s.vec3();
    const Vec3 expected = (g.k_pd * g.k_pp / m) * a + (g.k_pd * g.k_pd / m - g.k_pp) * b -
                          (g.k_pd / m + g.k_delta) * c;
    CHECK((compute_nu(a, b, c, g, m) - expected).norm() < 1e-12);
    const Vec3 sum = compute_nu(a + b, b + c, c + a, g, m);
    const Vec3 parts = compute_nu(a, b, c, g, m) + compute_nu(b, c, a, g, m);
    CHECK((sum - parts).norm() < 1e-12);
  }
}

TEST_CASE("compute_omega_d, compute_f_dot and compute_kappa") {
  const Vec3 d = analyze_allocation(default_hexarotor()).d_star;
  Sampler s(24);
  const double f_min = 0.05 * kStandardGravity;
  for (int i = 0; i < 20; ++i) {
    const Quaternion q_d = s.unit_quaternion();
    const Vec3 rd = to_rotation(q_d) * d;
    CHECK(compute_omega_d(q_d, d, 9.0, Vec3::Zero(), f_min).norm() == 0.0);
    CHECK(compute_omega_d(q_d, d, 9.0, 3.0 * rd, f_min).norm() < 1e-14);
    CHECK(compute_f_dot(q_d, d, Vec3::Zero()) == 0.0);
    CHECK(std::abs(compute_f_dot(q_d, d, rd)) == doctest::Approx(1.0).epsilon(1e-14));
    const Vec3 perp = rd.cross(s.unit_vec3());
    CHECK(std::abs(compute_f_dot(q_d, d, perp)) < 1e-14);
    CHECK(compute_kappa(q_d, d, 9.0, Vec3::Zero()) == 0.0);

    // Reference equal to q_d contributes nothing.
    const OrientationReference ext{q_d, 1.5};
    const Vec3 nu = s.vec3();
    CHECK((compute_omega_d(q_d, d, 9.0, nu, f_min, ext) - compute_omega_d(q_d, d, 9.0, nu, f_min))
              .norm() == 0.0);
    // The extension only rotates about d*.
    const OrientationReference other{s.unit_quaternion(), 1.5};
    const Vec3 extra = compute_omega_d(q_d, d, 9.0, nu, f_min, other) - compute_omega_d(q_d, d, 9.0, nu, f_min);
    CHECK(extra.cross(d).norm() < 1e-15 * (1.0 + extra.norm()) + 1e-16);
  }
  try {
    compute_omega_d(Quaternion::identity(), d, 0.1, Vec3::Zero(), f_min);
    FAIL("expected thrust-singularity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::thrust_singularity);
  }
  CHECK_THROWS_AS(compute_omega_dd(Quaternion::identity(), Quaternion::identity(), d, -0.1, Vec3::Zero(),
                                   Vec3::Zero(), Vec3::Zero(), Gains{}, 1.0, f_min),
                  Error);
}

TEST_CASE("compute_omega_dd vanishes on the equilibrium set") {
  const Vec3 d = analyze_allocation(default_hexarotor()).d_star;
  const double mg = kStandardGravity;
  const Quaternion q = aligning_attitude(d, 0.3);
  const Vec3 f_delta = compute_f_delta(q, d, mg, mg * Vec3::UnitZ());
  const Vec3 w = compute_omega_dd(q, q, d, mg, Vec3::Zero(), Vec3::Zero(), f_delta, Gains{}, 1.0, 0.05 * mg);
  CHECK(w.norm() < 1e-12);
}

TEST_CASE("compute_tau_r") {
  const Mat3 j = Vec3(0.01, 0.015, 0.02).asDiagonal();
  Gains g;
  Sampler s(25);
  const Quaternion q = s.unit_quaternion();
  CHECK(compute_tau_r(q, q, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), j, g).norm() < 1e-15);
  const Vec3 w = s.vec3();
  CHECK((compute_tau_r(q, q, w, w, Vec3::Zero(), j, g) - w.cross(j * w)).norm() < 1e-14);
  const double theta = 0.1;
  const Quaternion q_err = product(q, from_axis_angle(theta, Vec3::UnitZ()));
  const Vec3 tau = compute_tau_r(q_err, q, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), j, g);
  CHECK((tau + g.k_ap * std::sin(theta / 2) * Vec3::UnitZ()).norm() < 1e-14);
  // Antipodal desired attitude flips the proportional term: no canonicalization.
  const Vec3 tau_flip = compute_tau_r(q_err, -q, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), j, g);
  CHECK((tau_flip + tau).norm() < 1e-14);
}

TEST_CASE("compute_u and wrench decoupling") {
  for (const PlatformModel& m : {default_hexarotor(), coplanar_quadrotor()}) {
    const AllocationArtifacts a = analyze_allocation(m);
    const double mg = m.mass * kStandardGravity;
    const Vector u0 = compute_u(a, Vec3::Zero(), mg);
    CHECK((u0 - mg * a.u_bar).norm() < 1e-12);
    CHECK((m.force * u0 - mg * a.d_star).norm() < 1e-9);
    CHECK((m.moment * u0).norm() < 1e-9);
    Sampler s(26);
    const Vector uf = compute_u(a, s.vec3(), 0.0);
    CHECK((m.force * uf).norm() < 1e-9);
    for (int i = 0; i < 100; ++i) {
      const Vec3 tau = s.vec3(0.5);
      const double f = s.uniform(-20, 20);
      const Vector u = compute_u(a, tau, f);
      CHECK((m.force * u - a.d_star * f).norm() <= 1e-9 * (1.0 + std::abs(f)));
      CHECK((m.moment * u - tau).norm() <= 1e-9 * (1.0 + tau.norm()));
    }
  }
}

TEST_CASE("controller step at equilibrium") {
  const PlatformModel hexa = default_hexarotor();
  const HoverController ctrl = make_controller(hexa);
  const Vec3 p_r(0.5, -0.2, 1.0);
  RigidBodyState meas;
  meas.p = p_r;
  meas.q = aligning_attitude(ctrl.artifacts().d_star, 0.4);
  ControllerState st{meas.q, hexa.mass * kStandardGravity};
  const auto [out, next] = ctrl.step(meas, p_r, std::nullopt, 2e-3, st);
  CHECK((out.u - hexa.mass * kStandardGravity * ctrl.artifacts().u_bar).norm() < 1e-9);
  CHECK((next.q_d.as_vec4() - st.q_d.as_vec4()).norm() < 1e-15);
  CHECK(std::abs(next.f - st.f) < 1e-12);
  CHECK_THROWS_AS(ctrl.step(meas, p_r, std::nullopt, 0.0, st), Error);
}

TEST_CASE("controller initialization") {
  const PlatformModel hexa = default_hexarotor();
  const HoverController ctrl = make_controller(hexa);
  RigidBodyState meas;
  meas.q = from_axis_angle(0.3, Vec3(0.2, 1, 0).normalized());
  const ControllerState st = ctrl.initial_state(meas);
  CHECK((st.q_d.as_vec4() - meas.q.as_vec4()).norm() == 0.0);
  const double mg = hexa.mass * kStandardGravity;
  CHECK(st.f == mg);
  const ControlOutput out = ctrl.evaluate(meas, Vec3::Zero(), std::nullopt, st);
  const Vec3 expected = mg * (to_rotation(meas.q) * ctrl.artifacts().d_star - Vec3::UnitZ());
  CHECK((out.diag.f_delta - expected).norm() < 1e-12);
  CHECK(std::abs(out.diag.q_delta.eta - 1.0) < 1e-15);
}

TEST_CASE("thrust singularity and invalid gains") {
  const PlatformModel hexa = default_hexarotor();
  const HoverController ctrl = make_controller(hexa);
  RigidBodyState meas;
  ControllerState st{Quaternion::identity(), 0.01};
  try {
    ctrl.evaluate(meas, Vec3::Zero(), std::nullopt, st);
    FAIL("expected thrust-singularity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::thrust_singularity);
  }
  Gains bad;
  bad.k_ad = 0.0;
  CHECK_THROWS_AS(make_controller(hexa, bad), Error);
  bad = Gains{};
  bad.k_q = -1.0;
  CHECK_THROWS_AS(make_controller(hexa, bad), Error);
}

TEST_CASE("omega_dd is the time derivative of omega_d along the closed loop") {
  const HoverController ctrl = make_controller(default_hexarotor());
  const ClosedLoopOracle loop{ctrl, Vec3::Zero(), std::nullopt};
  const TrajectoryCheck r = omega_dd_identity(loop, start_state(ctrl, offset_state()), 1.0);
  MESSAGE("max relative error " << r.max_rel_error);
  CHECK(r.samples == 101);
  CHECK(r.max_rel_error < 1e-6);

  Gains g;
  g.k_q = 1.0;
  const HoverController ext_ctrl = make_controller(default_hexarotor(), g);
  const ClosedLoopOracle ext_loop{ext_ctrl, Vec3::Zero(), from_axis_angle(45 * kDeg, Vec3::UnitZ())};
  const TrajectoryCheck re = omega_dd_identity(ext_loop, start_state(ext_ctrl, offset_state()), 1.0);
  MESSAGE("max relative error with reference " << re.max_rel_error);
  CHECK(re.max_rel_error < 1e-6);
}

TEST_CASE("force mismatch decays exponentially on the attitude manifold") {
  for (double k : {0.5, 2.0}) {
    Gains g;
    g.k_delta = k;
    const HoverController ctrl = make_controller(default_hexarotor(), g);
    const ClosedLoopOracle loop{ctrl, Vec3::Zero(), std::nullopt};
    const JointState init = on_attitude_manifold(loop, start_state(ctrl, offset_state()));
    const TrajectoryCheck r = force_mismatch_law(loop, init, 1.0);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("reference orientation leaves the force mismatch rate unchanged") {
  Gains g;
  g.k_q = 2.0;
  const HoverController ctrl = make_controller(default_hexarotor(), g);
  const ClosedLoopOracle plain{ctrl, Vec3::Zero(), std::nullopt};
  const ClosedLoopOracle ext{ctrl, Vec3::Zero(), from_axis_angle(45 * kDeg, Vec3::UnitZ())};
  const Vec3 d = ctrl.artifacts().d_star;
  Sampler s(27);
  for (int i = 0; i < 50; ++i) {
    JointState js = start_state(ctrl, offset_state());
    js.ctrl.q_d = s.unit_quaternion();
    js.body.v = s.vec3();
    const ControlOutput a = plain.evaluate(js);
    const ControlOutput b = ext.evaluate(js);
    // d/dt (R(q_d) d* f) = R(q_d) ([omega_d]x d* f + d* f_dot)
    const Vec3 rate_a = to_rotation(js.ctrl.q_d) * (a.diag.omega_d.cross(d) * js.ctrl.f + d * a.diag.f_dot);
    const Vec3 rate_b = to_rotation(js.ctrl.q_d) * (b.diag.omega_d.cross(d) * js.ctrl.f + d * b.diag.f_dot);
    CHECK((rate_a - rate_b).norm() <= 1e-14 * (1.0 + rate_a.norm()));
    CHECK(a.diag.f_dot == b.diag.f_dot);
  }
}

TEST_CASE("Lyapunov derivative laws") {
  const PlatformModel hexa = default_hexarotor();
  const Gains g;
  Sampler s(28);
  for (int i = 0; i < 3; ++i) {
    const TrajectoryCheck a =
        attitude_lyapunov_law(hexa, g, s.unit_quaternion(), s.unit_quaternion(), s.vec3(0.5), 1.0);
    MESSAGE("attitude " << a.max_rel_error);
    CHECK(a.max_rel_error < 1e-6);
    const TrajectoryCheck p = position_lyapunov_law(hexa.mass, g, s.vec3(), s.vec3(), s.vec3(), 2.0);
    MESSAGE("position " << p.max_rel_error);
    CHECK(p.max_rel_error < 1e-6);
  }
}

TEST_CASE("orientation reference Lyapunov law on the hover set") {
  Gains g;
  g.k_q = 1.0;
  const HoverController ctrl = make_controller(default_hexarotor(), g);
  const ClosedLoopOracle loop{ctrl, Vec3(0, 0, 1), from_axis_angle(45 * kDeg, Vec3::UnitZ())};
  JointState init;
  init.body.p = loop.p_r;
  init.ctrl.q_d = aligning_attitude(ctrl.artifacts().d_star, -0.2);
  init.ctrl.f = ctrl.model().mass * kStandardGravity;
  init = on_attitude_manifold(loop, init);
  const TrajectoryCheck r = orientation_lyapunov_law(loop, init, 3.0);
  MESSAGE("max relative error " << r.max_rel_error);
  CHECK(r.max_rel_error < 1e-6);
}
