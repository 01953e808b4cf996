#include "zmd/controller.hpp"

#include <cmath>

#include <fmt/format.h>

#include "zmd/error.hpp"

namespace zmd {

namespace {

void require_thrust(double f, double f_min) {
  if (!(std::abs(f) >= f_min)) {
    throw Error(ErrorCode::thrust_singularity,
                fmt::format("|f| = {:.6g} N is below f_min = {:.6g} N", std::abs(f), f_min));
  }
}

// Coefficients of nu = c1 e_p + c2 e_v - c3 f_delta.
struct NuCoefficients {
  double c1;
  double c2;
  double c3;
};

NuCoefficients nu_coefficients(const Gains& g, double mass) {
  return {g.k_pd * g.k_pp / mass, g.k_pd * g.k_pd / mass - g.k_pp, g.k_pd / mass + g.k_delta};
}

}  // namespace

void Gains::validate() const {
  const bool ok = k_pp > 0.0 && k_pd > 0.0 && k_delta > 0.0 && k_ap > 0.0 && k_ad > 0.0 &&
                  k_q >= 0.0 && std::isfinite(k_pp) && std::isfinite(k_pd) &&
                  std::isfinite(k_delta) && std::isfinite(k_ap) && std::isfinite(k_ad) &&
                  std::isfinite(k_q);
  if (!ok) {
    throw Error(ErrorCode::invalid_argument,
                "gains k_pp, k_pd, k_delta, k_ap, k_ad must be > 0 and k_q >= 0");
  }
}

Vec3 compute_f_r(const Vec3& e_p, const Vec3& e_v, const Gains& gains, double mass,
                 double gravity) {
  return mass * gravity * Vec3::UnitZ() - gains.k_pp * e_p - gains.k_pd * e_v;
}

Vec3 compute_f_delta(const Quaternion& q_d, const Vec3& d_star, double f, const Vec3& f_r) {
  return to_rotation(q_d) * d_star * f - f_r;
}

Vec3 compute_nu(const Vec3& e_p, const Vec3& e_v, const Vec3& f_delta, const Gains& gains,
                double mass) {
  const NuCoefficients c = nu_coefficients(gains, mass);
  return c.c1 * e_p + c.c2 * e_v - c.c3 * f_delta;
}

Vec3 compute_omega_d(const Quaternion& q_d, const Vec3& d_star, double f, const Vec3& nu,
                     double f_min, const std::optional<OrientationReference>& ext) {
  require_thrust(f, f_min);
  Vec3 omega_d = d_star.cross(to_rotation(q_d).transpose() * nu) / f;
  if (ext) {
    const Quaternion q_rd = product(inverse(ext->q_r), q_d);
    omega_d += -ext->k_q * d_star.dot(q_rd.eps) * d_star;
  }
  return omega_d;
}

double compute_f_dot(const Quaternion& q_d, const Vec3& d_star, const Vec3& nu) {
  return (to_rotation(q_d) * d_star).dot(nu);
}

double compute_kappa(const Quaternion& q_d, const Vec3& d_star, double f, const Vec3& nu) {
  return -2.0 / f * d_star.dot(to_rotation(q_d).transpose() * nu);
}

Vec3 compute_omega_dd(const Quaternion& q, const Quaternion& q_d, const Vec3& d_star, double f,
                      const Vec3& e_p, const Vec3& e_v, const Vec3& f_delta, const Gains& gains,
                      double mass, double f_min, const std::optional<OrientationReference>& ext) {
  require_thrust(f, f_min);
  const Mat3 r_d = to_rotation(q_d);
  const Mat3 r = to_rotation(q);
  const NuCoefficients c = nu_coefficients(gains, mass);
  const Vec3 nu = c.c1 * e_p + c.c2 * e_v - c.c3 * f_delta;
  const Vec3 nu_body = r_d.transpose() * nu;
  const double kappa = -2.0 / f * d_star.dot(nu_body);

  // d/dt nu, written up to terms parallel to R(q_d) d* (those vanish under
  // [d*]x R(q_d)^T). Uses m de_v/dt = R(q) d* f - m g e3 and
  // df_delta/dt = nu + k_pp e_v + k_pd de_v/dt, then adds kappa nu for the
  // variation of 1/f and of R(q_d).
  const double kpp = gains.k_pp;
  const double kpd = gains.k_pd;
  const double kdl = gains.k_delta;
  const double m = mass;
  const double k1 = -(kpp + kdl * kpd) / m;
  const double k2 = kpp * kpp / m - kpd * kpd * kpp / (m * m) + kappa * c.c1;
  const double k3 = 2.0 * kpd * kpp / m - kpd * kpd * kpd / (m * m) + kappa * c.c2;
  const double k4 = kpd * kpd / (m * m) - kpp / m + kdl * kpd / m + kdl * kdl - kappa * c.c3;
  const Vec3 drive = k1 * (r * d_star) * f + k2 * e_p + k3 * e_v + k4 * f_delta;
  Vec3 omega_dd = d_star.cross(r_d.transpose() * drive) / f;

  if (ext) {
    const Quaternion q_rd = product(inverse(ext->q_r), q_d);
    const Vec3 omega_ext = -ext->k_q * d_star.dot(q_rd.eps) * d_star;
    const Vec3 omega_d = d_star.cross(nu_body) / f + omega_ext;
    // R(q_d) also turns with the extra rate; that adds -(1/f) d* x (omega' x R_d^T nu).
    omega_dd += -d_star.cross(omega_ext.cross(nu_body)) / f;
    // d/dt eps' = 1/2 (eta' I + [eps']x) omega_d.
    const Vec3 eps_rate = 0.5 * (q_rd.eta * omega_d + q_rd.eps.cross(omega_d));
    omega_dd += -ext->k_q * d_star.dot(eps_rate) * d_star;
  }
  return omega_dd;
}

Vec3 compute_tau_r(const Quaternion& q, const Quaternion& q_d, const Vec3& omega,
                   const Vec3& omega_d, const Vec3& omega_dd, const Mat3& inertia,
                   const Gains& gains) {
  const Quaternion q_delta = product(inverse(q_d), q);
  return -gains.k_ap * q_delta.eps - gains.k_ad * (omega - omega_d) +
         omega.cross(inertia * omega) + inertia * omega_dd;
}

Vector compute_u(const AllocationArtifacts& artifacts, const Vec3& tau_r, double f) {
  return artifacts.moment_pinv * tau_r + artifacts.u_bar * f;
}

HoverController::HoverController(PlatformModel model, AllocationArtifacts artifacts, Gains gains,
                                 double gravity)
    : model_(std::move(model)),
      artifacts_(std::move(artifacts)),
      gains_(gains),
      gravity_(gravity) {
  gains_.validate();
  if (!(gravity_ > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "gravity must be positive");
  }
  if (artifacts_.u_bar.size() != model_.rotor_count()) {
    throw Error(ErrorCode::dimension_mismatch, "allocation artifacts do not match the platform");
  }
}

ControllerState HoverController::initial_state(const RigidBodyState& first_measurement) const {
  return {first_measurement.q, model_.mass * gravity_};
}

std::optional<OrientationReference> HoverController::reference(
    const std::optional<Quaternion>& q_r) const {
  if (!q_r) return std::nullopt;
  return OrientationReference{*q_r, gains_.k_q};
}

ControlOutput HoverController::evaluate(const RigidBodyState& measured, const Vec3& p_r,
                                        const std::optional<Quaternion>& q_r,
                                        const ControllerState& state) const {
  const auto ext = reference(q_r);
  const Vec3& d = artifacts_.d_star;
  const double m = model_.mass;

  ControlOutput out;
  ControlDiagnostics& dg = out.diag;
  dg.e_p = measured.p - p_r;
  dg.e_v = measured.v;
  dg.f_r = compute_f_r(dg.e_p, dg.e_v, gains_, m, gravity_);
  dg.f_delta = compute_f_delta(state.q_d, d, state.f, dg.f_r);
  dg.nu = compute_nu(dg.e_p, dg.e_v, dg.f_delta, gains_, m);
  dg.omega_d = compute_omega_d(state.q_d, d, state.f, dg.nu, f_min(), ext);
  dg.f_dot = compute_f_dot(state.q_d, d, dg.nu);
  dg.omega_dd = compute_omega_dd(measured.q, state.q_d, d, state.f, dg.e_p, dg.e_v, dg.f_delta,
                                 gains_, m, f_min(), ext);
  dg.tau_r = compute_tau_r(measured.q, state.q_d, measured.omega, dg.omega_d, dg.omega_dd,
                           model_.inertia, gains_);
  dg.q_delta = product(inverse(state.q_d), measured.q);
  dg.omega_delta = measured.omega - dg.omega_d;
  if (ext) dg.q_delta_ref = product(inverse(ext->q_r), state.q_d);
  out.u = compute_u(artifacts_, dg.tau_r, state.f);

  if (!out.u.allFinite() || !dg.omega_dd.allFinite() || !std::isfinite(dg.f_dot)) {
    throw Error(ErrorCode::controller_fault, "non-finite value in the control law");
  }
  return out;
}

std::pair<Vec4, double> HoverController::internal_rates(const ControllerState& state,
                                                        const ControlDiagnostics& diag) {
  return {qdot_body(state.q_d, diag.omega_d), diag.f_dot};
}

std::pair<ControlOutput, ControllerState> HoverController::step(
    const RigidBodyState& measured, const Vec3& p_r, const std::optional<Quaternion>& q_r,
    double dt, const ControllerState& state) const {
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "controller step: dt must be positive");
  }
  ControlOutput out = evaluate(measured, p_r, q_r, state);
  const auto [q_rate, f_rate] = internal_rates(state, out.diag);
  ControllerState next;
  next.q_d = Quaternion::from_vec4(state.q_d.as_vec4() + dt * q_rate);
  if (!next.q_d.as_vec4().allFinite()) {
    throw Error(ErrorCode::controller_fault, "non-finite desired attitude");
  }
  next.q_d = normalized(next.q_d);
  next.f = state.f + dt * f_rate;
  return {std::move(out), next};
}

}  // namespace zmd
