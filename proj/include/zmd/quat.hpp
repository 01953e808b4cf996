#pragma once

#include <Eigen/Dense>

namespace zmd {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

/// Unit quaternion stored as scalar part `eta` and vector part `eps`.
///
/// No sign canonicalization is performed anywhere: q and -q are distinct
/// values that map to the same rotation. The controller relies on the sign
/// of its error quaternions evolving continuously.
struct Quaternion {
  double eta = 1.0;
  Vec3 eps = Vec3::Zero();

  static Quaternion identity() { return {}; }
  static Quaternion from_vec4(const Vec4& v) { return {v(0), v.tail<3>()}; }

  Vec4 as_vec4() const { return {eta, eps.x(), eps.y(), eps.z()}; }
  double squared_norm() const { return eta * eta + eps.squaredNorm(); }
  double norm() const;
  Quaternion operator-() const { return {-eta, -eps}; }
};

/// Skew-symmetric matrix such that skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);

/// Left-multiplication matrix: A(q1) q2 == q1 (x) q2.
Eigen::Matrix4d left_matrix(const Quaternion& q);
/// Right-multiplication matrix: B(q2) q1 == q1 (x) q2.
Eigen::Matrix4d right_matrix(const Quaternion& q);

/// R(q) = I + 2 eta [eps]x + 2 [eps]x^2. Maps body coordinates to world.
/// Throws invalid_argument when |q| deviates from 1 by more than 1e-6.
Mat3 to_rotation(const Quaternion& q);

/// (cos(theta/2), sin(theta/2) u). The axis must be unit within 1e-9.
Quaternion from_axis_angle(double theta, const Vec3& axis);

Quaternion product(const Quaternion& q1, const Quaternion& q2);
Quaternion inverse(const Quaternion& q);

/// q (x) (0, w) (x) q^-1, i.e. R(q) w.
Vec3 rotate(const Quaternion& q, const Vec3& w);

/// 1/2 q (x) (0, omega) with omega in the rotating (body) frame.
Vec4 qdot_body(const Quaternion& q, const Vec3& omega);
/// 1/2 (0, omega_world) (x) q with omega in the fixed (world) frame.
Vec4 qdot_world(const Quaternion& q, const Vec3& omega_world);

/// Returns q / |q|. Used after integration steps only.
Quaternion normalized(const Quaternion& q);

/// exp map of a rotation vector: rotation of |phi| about phi/|phi|.
Quaternion from_rotation_vector(const Vec3& phi);
/// Inverse of from_rotation_vector for the shortest representative.
Vec3 to_rotation_vector(const Quaternion& q);

/// Roll-pitch-yaw (ZYX convention) in radians. Reporting only.
Vec3 to_roll_pitch_yaw(const Quaternion& q);
Quaternion from_roll_pitch_yaw(const Vec3& rpy);

}  // namespace zmd
