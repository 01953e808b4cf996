#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "zmd/quat.hpp"

namespace zmd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative singular-value threshold below which a direction counts as null.
inline constexpr double kRankTolerance = 1e-9;

/// One propeller. `sigma` is +1 for CCW and -1 for CW.
struct RotorSpec {
  Vec3 position = Vec3::Zero();      // m, body frame
  Vec3 axis = Vec3::UnitZ();         // unit spin axis, body frame
  double c_f = 0.0;                  // thrust coefficient
  double c_tau_plus = 0.0;           // drag coefficient (positive)
  int sigma = 1;

  /// Signed drag coefficient c_tau = -sigma * c_tau_plus.
  double c_tau() const { return -static_cast<double>(sigma) * c_tau_plus; }
};

struct AllocationMatrices {
  Matrix force;   // F, 3 x n
  Matrix moment;  // M, 3 x n
};

/// Immutable description of a multirotor. Construct with make_platform().
struct PlatformModel {
  double mass = 0.0;
  Mat3 inertia = Mat3::Identity();
  std::vector<RotorSpec> rotors;
  Matrix force;   // F
  Matrix moment;  // M

  int rotor_count() const { return static_cast<int>(rotors.size()); }
};

/// Validates the rotors and stacks F and M column by column.
AllocationMatrices build_allocation(const std::vector<RotorSpec>& rotors);

/// Validates mass and inertia, then calls build_allocation.
PlatformModel make_platform(double mass, const Mat3& inertia, std::vector<RotorSpec> rotors);

/// Numeric rank with singular values below tol * sigma_max treated as zero.
int numeric_rank(const Matrix& a, double tol = kRankTolerance);

/// Orthonormal basis (columns) of ker(A), computed from a full SVD.
Matrix nullspace_basis(const Matrix& a, double tol = kRankTolerance);

struct Assumption1Report {
  bool holds = false;
  int rank_force = 0;             // rk(F)
  int rank_moment = 0;            // rk(M)
  int rank_moment_on_force_null = 0;  // rk(M F_bar)
  int rank_force_on_moment_null = 0;  // rk(F M_bar)
  Matrix force_null;              // F_bar
  Matrix moment_null;             // M_bar
};

/// True iff rk(M F_bar) == 3 where Im(F_bar) = ker(F).
Assumption1Report check_assumption1(const Matrix& force, const Matrix& moment);

struct ZeroMomentDirection {
  Vector u_bar;  // in ker(M), |F u_bar| = 1
  Vec3 d_star;   // F u_bar
};

/// Picks u_bar in ker(M) maximizing |F v| over unit v, normalized so that
/// |F u_bar| = 1, with the sign fixed by e3.d >= 0 (ties: e1.d >= 0).
ZeroMomentDirection zero_moment_direction(const Matrix& force, const Matrix& moment);

struct GeneralizedInverse {
  Matrix weight;       // K = F_bar F_bar^T
  Matrix moment_pinv;  // M_K^+ = K M^T (M K M^T)^-1
};

/// Right inverse of M with F M_K^+ = 0. Throws near_singular_allocation when
/// cond(M K M^T) > 1e12.
GeneralizedInverse pseudo_inverse_mk(const Matrix& force, const Matrix& moment);

/// Everything the controller needs from the allocation analysis.
struct AllocationArtifacts {
  Matrix force_null;   // F_bar
  Matrix moment_null;  // M_bar
  Vector u_bar;
  Vec3 d_star = Vec3::UnitZ();
  Matrix weight;       // K
  Matrix moment_pinv;  // M_K^+
  Assumption1Report report;
};

/// Runs the full analysis; throws no_zero_moment_direction when
/// the rank condition rk(M F_bar) = 3 fails.
AllocationArtifacts analyze_allocation(const PlatformModel& model);

struct HexarotorParams {
  double mass = 1.0;
  Mat3 inertia = Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();
  double arm_length = 0.3;
  double c_f = 9.9e-4;
  double c_tau_plus = 1.9e-5;
  std::array<double, 3> alphas{};  // rad, rotors 1,3,5; rotors 2,4,6 get the negatives
  double beta = 0.0;               // rad, same for every rotor
  std::array<int, 6> sigmas{-1, 1, -1, 1, -1, 1};
};

/// Defaults used by the bundled fixtures: alphas (15, 20, 25) deg, beta 10 deg.
HexarotorParams default_hexarotor_params();

/// Rotor placement of a star-shaped hexarotor: gamma_i = (i-1) pi/3 around e3,
/// spin axis R(gamma_i, e3) R(beta, e2) R(alpha_i, e1) e3.
RotorSpec tilted_rotor(double gamma, double alpha, double beta, double arm_length,
                       double c_f, double c_tau_plus, int sigma);

/// Star-shaped tilted hexarotor. Throws invalid_tilt_pattern unless the three
/// alphas are pairwise distinct.
PlatformModel hexarotor_factory(const HexarotorParams& params);

}  // namespace zmd
