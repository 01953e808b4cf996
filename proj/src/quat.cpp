#include "zmd/quat.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "zmd/error.hpp"

namespace zmd {

namespace {

constexpr double kUnitTolerance = 1e-6;
constexpr double kAxisTolerance = 1e-9;

void require_unit(const Quaternion& q, const char* where) {
  const double n = q.norm();
  if (!(std::abs(n - 1.0) <= kUnitTolerance)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("{}: quaternion norm {} is not 1", where, n));
  }
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::invalid_platform: return "invalid-platform";
    case ErrorCode::invalid_tilt_pattern: return "invalid-tilt-pattern";
    case ErrorCode::no_zero_moment_direction: return "no-zero-moment-direction";
    case ErrorCode::near_singular_allocation: return "near-singular-allocation";
    case ErrorCode::thrust_singularity: return "thrust-singularity";
    case ErrorCode::controller_fault: return "controller-fault";
    case ErrorCode::integration_diverged: return "integration-diverged";
    case ErrorCode::config_error: return "config-error";
  }
  return "unknown";
}

double Quaternion::norm() const { return std::sqrt(squared_norm()); }

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

Eigen::Matrix4d left_matrix(const Quaternion& q) {
  Eigen::Matrix4d a;
  a(0, 0) = q.eta;
  a.block<1, 3>(0, 1) = -q.eps.transpose();
  a.block<3, 1>(1, 0) = q.eps;
  a.block<3, 3>(1, 1) = q.eta * Mat3::Identity() + skew(q.eps);
  return a;
}

Eigen::Matrix4d right_matrix(const Quaternion& q) {
  Eigen::Matrix4d b;
  b(0, 0) = q.eta;
  b.block<1, 3>(0, 1) = -q.eps.transpose();
  b.block<3, 1>(1, 0) = q.eps;
  b.block<3, 3>(1, 1) = q.eta * Mat3::Identity() - skew(q.eps);
  return b;
}

Mat3 to_rotation(const Quaternion& q) {
  require_unit(q, "to_rotation");
  const Mat3 s = skew(q.eps);
  return Mat3::Identity() + 2.0 * q.eta * s + 2.0 * s * s;
}

Quaternion from_axis_angle(double theta, const Vec3& axis) {
  if (!(std::abs(axis.norm() - 1.0) <= kAxisTolerance)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("from_axis_angle: axis norm {} is not 1", axis.norm()));
  }
  if (!std::isfinite(theta)) {
    throw Error(ErrorCode::invalid_argument, "from_axis_angle: non-finite angle");
  }
  return {std::cos(0.5 * theta), std::sin(0.5 * theta) * axis};
}

Quaternion product(const Quaternion& q1, const Quaternion& q2) {
  return {q1.eta * q2.eta - q1.eps.dot(q2.eps),
          q2.eta * q1.eps + q1.eta * q2.eps + q1.eps.cross(q2.eps)};
}

Quaternion inverse(const Quaternion& q) { return {q.eta, -q.eps}; }

Vec3 rotate(const Quaternion& q, const Vec3& w) {
  const Quaternion pure{0.0, w};
  return product(product(q, pure), inverse(q)).eps;
}

Vec4 qdot_body(const Quaternion& q, const Vec3& omega) {
  Vec4 d;
  d(0) = -0.5 * q.eps.dot(omega);
  d.tail<3>() = 0.5 * (q.eta * omega + q.eps.cross(omega));
  return d;
}

Vec4 qdot_world(const Quaternion& q, const Vec3& omega_world) {
  Vec4 d;
  d(0) = -0.5 * q.eps.dot(omega_world);
  d.tail<3>() = 0.5 * (q.eta * omega_world - q.eps.cross(omega_world));
  return d;
}

Quaternion normalized(const Quaternion& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::invalid_argument, "normalized: degenerate quaternion");
  }
  return {q.eta / n, q.eps / n};
}

Quaternion from_rotation_vector(const Vec3& phi) {
  const double angle = phi.norm();
  if (angle < 1e-12) {
    return normalized({1.0, 0.5 * phi});
  }
  return {std::cos(0.5 * angle), std::sin(0.5 * angle) / angle * phi};
}

Vec3 to_rotation_vector(const Quaternion& q) {
  const Quaternion c = q.eta < 0.0 ? -q : q;
  const double s = c.eps.norm();
  if (s < 1e-12) {
    return 2.0 * c.eps;
  }
  return 2.0 * std::atan2(s, c.eta) / s * c.eps;
}

Vec3 to_roll_pitch_yaw(const Quaternion& q) {
  const Mat3 r = to_rotation(q);
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

Quaternion from_roll_pitch_yaw(const Vec3& rpy) {
  const Quaternion qz = from_axis_angle(rpy.z(), Vec3::UnitZ());
  const Quaternion qy = from_axis_angle(rpy.y(), Vec3::UnitY());
  const Quaternion qx = from_axis_angle(rpy.x(), Vec3::UnitX());
  return product(product(qz, qy), qx);
}

}  // namespace zmd
