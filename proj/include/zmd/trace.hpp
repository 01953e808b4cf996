#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zmd/dynamics.hpp"

namespace zmd {

struct TraceRecord {
  double t = 0.0;
  RigidBodyState state;
  Vec3 e_p = Vec3::Zero();
  Vec3 rpy_delta = Vec3::Zero();  // roll-pitch-yaw of q_d^-1 (x) q, reporting only
  Vec3 f_delta = Vec3::Zero();
  double f = 0.0;
  Vector u;       // commanded inputs
  Vector speeds;  // applied rotor speeds, Hz
  Vec3 tau_r = Vec3::Zero();
  std::optional<double> reference_alignment;  // d*^T eps'_Delta when q_r is set
};

struct SimTrace {
  int rotor_count = 0;
  std::vector<TraceRecord> records;
};

std::string csv_header(int rotor_count);
void write_csv(std::ostream& out, const SimTrace& trace);

struct TraceSummary {
  std::optional<double> settling_time;  // first t after which |e_p| < threshold for good
  double thrust_error = 0.0;            // |f - m g| / (m g) at the last record
  double max_rotor_speed = 0.0;
  std::optional<double> final_alignment;  // |d*^T eps'_Delta| at the last record
};

inline constexpr double kSettlingThreshold = 0.02;  // m

TraceSummary summarize(const SimTrace& trace, double mass, double gravity,
                       double threshold = kSettlingThreshold);

/// Settling time of a sampled error-norm series; nullopt if the last sample
/// is still above the threshold.
std::optional<double> settling_time(const std::vector<double>& t, const std::vector<double>& err,
                                    double threshold);

}  // namespace zmd
