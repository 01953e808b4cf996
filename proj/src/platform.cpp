#include "zmd/platform.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "zmd/error.hpp"

namespace zmd {

namespace {

constexpr double kMaxAllocationCondition = 1e12;

double deg(double d) { return d * std::numbers::pi / 180.0; }

void validate_rotor(const RotorSpec& r, std::size_t i) {
  if (!r.position.allFinite() || !r.axis.allFinite()) {
    throw Error(ErrorCode::invalid_platform, fmt::format("rotor {}: non-finite geometry", i + 1));
  }
  if (std::abs(r.axis.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::invalid_platform,
                fmt::format("rotor {}: spin axis norm {} is not 1", i + 1, r.axis.norm()));
  }
  if (!(r.c_f > 0.0) || !(r.c_tau_plus > 0.0)) {
    throw Error(ErrorCode::invalid_platform,
                fmt::format("rotor {}: c_f and c_tau_plus must be positive", i + 1));
  }
  if (r.sigma != 1 && r.sigma != -1) {
    throw Error(ErrorCode::invalid_platform, fmt::format("rotor {}: sigma must be +1 or -1", i + 1));
  }
}

}  // namespace

AllocationMatrices build_allocation(const std::vector<RotorSpec>& rotors) {
  if (rotors.size() < 4) {
    throw Error(ErrorCode::invalid_platform,
                fmt::format("need at least 4 rotors, got {}", rotors.size()));
  }
  const auto n = static_cast<Eigen::Index>(rotors.size());
  AllocationMatrices out{Matrix(3, n), Matrix(3, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const RotorSpec& r = rotors[static_cast<std::size_t>(i)];
    validate_rotor(r, static_cast<std::size_t>(i));
    out.force.col(i) = r.c_f * r.axis;
    out.moment.col(i) = r.c_f * r.position.cross(r.axis) + r.c_tau() * r.axis;
  }
  return out;
}

PlatformModel make_platform(double mass, const Mat3& inertia, std::vector<RotorSpec> rotors) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::invalid_platform, "mass must be positive");
  }
  if (!inertia.allFinite() || !inertia.isApprox(inertia.transpose(), 1e-12)) {
    throw Error(ErrorCode::invalid_platform, "inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorCode::invalid_platform, "inertia must be positive definite");
  }
  AllocationMatrices alloc = build_allocation(rotors);
  PlatformModel model;
  model.mass = mass;
  model.inertia = inertia;
  model.rotors = std::move(rotors);
  model.force = std::move(alloc.force);
  model.moment = std::move(alloc.moment);
  return model;
}

int numeric_rank(const Matrix& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol * s(0)) ++rank;
  }
  return rank;
}

Matrix nullspace_basis(const Matrix& a, double tol) {
  const Eigen::Index n = a.cols();
  if (n == 0) return Matrix(0, 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const int rank = numeric_rank(a, tol);
  return svd.matrixV().rightCols(n - rank);
}

Assumption1Report check_assumption1(const Matrix& force, const Matrix& moment) {
  if (force.rows() != 3 || moment.rows() != 3 || force.cols() != moment.cols()) {
    throw Error(ErrorCode::dimension_mismatch, "F and M must both be 3 x n");
  }
  Assumption1Report rep;
  rep.rank_force = numeric_rank(force);
  rep.rank_moment = numeric_rank(moment);
  rep.force_null = nullspace_basis(force);
  rep.moment_null = nullspace_basis(moment);
  rep.rank_moment_on_force_null =
      rep.force_null.cols() == 0 ? 0 : numeric_rank(moment * rep.force_null);
  rep.rank_force_on_moment_null =
      rep.moment_null.cols() == 0 ? 0 : numeric_rank(force * rep.moment_null);
  rep.holds = rep.rank_moment_on_force_null == 3;
  return rep;
}

ZeroMomentDirection zero_moment_direction(const Matrix& force, const Matrix& moment) {
  const Matrix moment_null = nullspace_basis(moment);
  const double force_scale = force.size() == 0 ? 0.0 : Eigen::JacobiSVD<Matrix>(force).singularValues()(0);
  if (moment_null.cols() == 0 || !(force_scale > 0.0)) {
    throw Error(ErrorCode::no_zero_moment_direction, "ker(M) is trivial or F is zero");
  }
  const Matrix fm = force * moment_null;
  Eigen::JacobiSVD<Matrix> svd(fm, Eigen::ComputeFullV);
  if (!(svd.singularValues()(0) > kRankTolerance * force_scale)) {
    throw Error(ErrorCode::no_zero_moment_direction, "rk(F M_bar) = 0");
  }
  const Vector w = svd.matrixV().col(0);
  Vector u_bar = moment_null * w;
  u_bar /= (force * u_bar).norm();
  Vec3 d = force * u_bar;
  const bool flip = std::abs(d.z()) <= 1e-9 ? d.x() < 0.0 : d.z() < 0.0;
  if (flip) {
    u_bar = -u_bar;
    d = -d;
  }
  return {u_bar, d};
}

GeneralizedInverse pseudo_inverse_mk(const Matrix& force, const Matrix& moment) {
  const Matrix force_null = nullspace_basis(force);
  GeneralizedInverse out;
  out.weight = force_null * force_null.transpose();
  const Mat3 gram = moment * out.weight * moment.transpose();
  const Eigen::Vector3d s = Eigen::JacobiSVD<Mat3>(gram).singularValues();
  if (!(s(0) > 0.0) || s(0) > kMaxAllocationCondition * s(2)) {
    throw Error(ErrorCode::near_singular_allocation,
                fmt::format("M K M^T condition number {:.3g} exceeds 1e12", s(0) / s(2)));
  }
  // gram and K are symmetric, so K M^T gram^-1 = (gram^-1 M K)^T.
  out.moment_pinv = gram.ldlt().solve(moment * out.weight).transpose();
  return out;
}

AllocationArtifacts analyze_allocation(const PlatformModel& model) {
  AllocationArtifacts art;
  art.report = check_assumption1(model.force, model.moment);
  if (!art.report.holds) {
    throw Error(ErrorCode::no_zero_moment_direction,
                fmt::format("rank condition violated: rk(M F_bar) = {}, rk(M) = {}",
                            art.report.rank_moment_on_force_null, art.report.rank_moment));
  }
  ZeroMomentDirection zmd = zero_moment_direction(model.force, model.moment);
  GeneralizedInverse gi = pseudo_inverse_mk(model.force, model.moment);
  art.force_null = art.report.force_null;
  art.moment_null = art.report.moment_null;
  art.u_bar = std::move(zmd.u_bar);
  art.d_star = zmd.d_star;
  art.weight = std::move(gi.weight);
  art.moment_pinv = std::move(gi.moment_pinv);
  return art;
}

HexarotorParams default_hexarotor_params() {
  HexarotorParams p;
  p.alphas = {deg(15.0), deg(20.0), deg(25.0)};
  p.beta = deg(10.0);
  return p;
}

RotorSpec tilted_rotor(double gamma, double alpha, double beta, double arm_length,
                       double c_f, double c_tau_plus, int sigma) {
  const Quaternion q_gamma = from_axis_angle(gamma, Vec3::UnitZ());
  const Quaternion q_rotor =
      product(product(q_gamma, from_axis_angle(beta, Vec3::UnitY())),
              from_axis_angle(alpha, Vec3::UnitX()));
  RotorSpec r;
  r.position = rotate(q_gamma, Vec3(arm_length, 0.0, 0.0));
  r.axis = rotate(q_rotor, Vec3::UnitZ()).normalized();
  r.c_f = c_f;
  r.c_tau_plus = c_tau_plus;
  r.sigma = sigma;
  return r;
}

PlatformModel hexarotor_factory(const HexarotorParams& params) {
  const auto& a = params.alphas;
  if (a[0] == a[1] || a[0] == a[2] || a[1] == a[2]) {
    throw Error(ErrorCode::invalid_tilt_pattern,
                "alpha angles of rotors 1, 3 and 5 must be pairwise distinct");
  }
  if (!(params.arm_length > 0.0)) {
    throw Error(ErrorCode::invalid_platform, "arm length must be positive");
  }
  std::vector<RotorSpec> rotors;
  rotors.reserve(6);
  for (int i = 0; i < 6; ++i) {
    const double gamma = i * std::numbers::pi / 3.0;
    const double alpha = (i % 2 == 0) ? a[static_cast<std::size_t>(i / 2)]
                                      : -a[static_cast<std::size_t>(i / 2)];
    rotors.push_back(tilted_rotor(gamma, alpha, params.beta, params.arm_length, params.c_f,
                                  params.c_tau_plus, params.sigmas[static_cast<std::size_t>(i)]));
  }
  return make_platform(params.mass, params.inertia, std::move(rotors));
}

}  // namespace zmd
