#pragma once

#include <optional>
#include <utility>

#include "zmd/dynamics.hpp"
#include "zmd/platform.hpp"
#include "zmd/quat.hpp"

namespace zmd {

/// Scalar gains of the hierarchical hover controller.
struct Gains {
  double k_pp = 4.0;     // position proportional, N/m
  double k_pd = 4.0;     // position derivative, N s/m
  double k_delta = 2.0;  // force-mismatch convergence rate, 1/s
  double k_ap = 2.0;     // attitude proportional, N m
  double k_ad = 0.2;     // attitude derivative, N m s
  double k_q = 0.0;      // restricted orientation gain, 1/s (0 disables)

  /// Throws invalid_argument unless the first five are > 0 and k_q >= 0.
  void validate() const;
};

/// Dynamic states owned by the controller.
struct ControllerState {
  Quaternion q_d;  // desired attitude, body_d -> world
  double f = 0.0;  // thrust intensity along d*, N
};

/// Optional secondary goal: rotate about d* towards a reference attitude.
struct OrientationReference {
  Quaternion q_r;
  double k_q = 0.0;
};

struct ControlDiagnostics {
  Vec3 e_p = Vec3::Zero();
  Vec3 e_v = Vec3::Zero();
  Vec3 f_r = Vec3::Zero();
  Vec3 f_delta = Vec3::Zero();
  Vec3 nu = Vec3::Zero();
  Vec3 omega_d = Vec3::Zero();
  Vec3 omega_dd = Vec3::Zero();
  Vec3 tau_r = Vec3::Zero();
  Quaternion q_delta;
  Vec3 omega_delta = Vec3::Zero();
  double f_dot = 0.0;
  std::optional<Quaternion> q_delta_ref;  // q_r^-1 (x) q_d when a reference is set
};

struct ControlOutput {
  Vector u;
  ControlDiagnostics diag;
};

/// m g e3 - k_pp e_p - k_pd e_v
Vec3 compute_f_r(const Vec3& e_p, const Vec3& e_v, const Gains& gains, double mass,
                 double gravity = kStandardGravity);

/// R(q_d) d* f - f_r
Vec3 compute_f_delta(const Quaternion& q_d, const Vec3& d_star, double f, const Vec3& f_r);

Vec3 compute_nu(const Vec3& e_p, const Vec3& e_v, const Vec3& f_delta, const Gains& gains,
                double mass);

/// (1/f) [d*]x R(q_d)^T nu, plus -k_q d* d*^T eps'_Delta with a reference.
/// Throws thrust_singularity when |f| < f_min.
Vec3 compute_omega_d(const Quaternion& q_d, const Vec3& d_star, double f, const Vec3& nu,
                     double f_min, const std::optional<OrientationReference>& ext = std::nullopt);

/// (R(q_d) d*)^T nu
double compute_f_dot(const Quaternion& q_d, const Vec3& d_star, const Vec3& nu);

/// -(2/f) d*^T R(q_d)^T nu
double compute_kappa(const Quaternion& q_d, const Vec3& d_star, double f, const Vec3& nu);

/// Closed-form time derivative of compute_omega_d along closed-loop solutions
/// of the plant driven by compute_u. `q` is the measured attitude.
Vec3 compute_omega_dd(const Quaternion& q, const Quaternion& q_d, const Vec3& d_star, double f,
                      const Vec3& e_p, const Vec3& e_v, const Vec3& f_delta, const Gains& gains,
                      double mass, double f_min,
                      const std::optional<OrientationReference>& ext = std::nullopt);

/// -k_ap eps_Delta - k_ad (omega - omega_d) + omega x J omega + J omega_dd,
/// with q_Delta = q_d^-1 (x) q taken as is (no sign flip).
Vec3 compute_tau_r(const Quaternion& q, const Quaternion& q_d, const Vec3& omega,
                   const Vec3& omega_d, const Vec3& omega_dd, const Mat3& inertia,
                   const Gains& gains);

/// M_K^+ tau_r + u_bar f
Vector compute_u(const AllocationArtifacts& artifacts, const Vec3& tau_r, double f);

/// Zero-moment-direction hover controller. Stateless itself: the dynamic
/// states travel in ControllerState so a step is a pure transition.
class HoverController {
 public:
  HoverController(PlatformModel model, AllocationArtifacts artifacts, Gains gains,
                  double gravity = kStandardGravity);

  /// q_d(0) = first attitude measurement, f(0) = m g.
  ControllerState initial_state(const RigidBodyState& first_measurement) const;

  /// Evaluates the control law without advancing the internal states.
  ControlOutput evaluate(const RigidBodyState& measured, const Vec3& p_r,
                         const std::optional<Quaternion>& q_r, const ControllerState& state) const;

  /// Evaluates the law, then advances q_d and f by explicit Euler over dt.
  std::pair<ControlOutput, ControllerState> step(const RigidBodyState& measured, const Vec3& p_r,
                                                 const std::optional<Quaternion>& q_r, double dt,
                                                 const ControllerState& state) const;

  /// Time derivative of (q_d, f) implied by a previous evaluate().
  static std::pair<Vec4, double> internal_rates(const ControllerState& state,
                                                const ControlDiagnostics& diag);

  const PlatformModel& model() const { return model_; }
  const AllocationArtifacts& artifacts() const { return artifacts_; }
  const Gains& gains() const { return gains_; }
  double gravity() const { return gravity_; }
  double f_min() const { return 0.05 * model_.mass * gravity_; }

 private:
  std::optional<OrientationReference> reference(const std::optional<Quaternion>& q_r) const;

  PlatformModel model_;
  AllocationArtifacts artifacts_;
  Gains gains_;
  double gravity_;
};

}  // namespace zmd
