#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "zmd/controller.hpp"
#include "zmd/dynamics.hpp"
#include "zmd/error.hpp"
#include "zmd/trace.hpp"

namespace zmd {

using Rng = std::mt19937_64;

/// Motion-capture + IMU degradation. Defaults are the reference noise levels
/// with a 12 ms delay and 100 Hz sample-and-hold.
struct SensorModel {
  double std_p = 6.4e-4;      // m
  double std_v = 1.4e-3;      // m/s
  double std_q = 1.2e-3;      // rad, magnitude of a random body-frame rotation
  double std_omega = 2.7e-3;  // rad/s
  double delay = 0.012;       // s
  double sensor_rate = 100.0;  // Hz; <= 0 samples on every call

  void validate() const;
};

/// ESC + motor-propeller model. Speeds are in Hz.
struct ActuatorModel {
  double speed_min = 0.0;
  double speed_max = 122.88;
  int quant_bits = 10;               // 0 disables quantization
  double motor_time_constant = 0.005;  // s; 0 disables the lag
  double speed_noise_coeff = 0.002;  // noise std = coeff * |speed|

  void validate() const;
  double quantization_step() const;
};

/// Delayed, sampled-and-held, noisy view of the true state. Keeps a history
/// of true states so the delay can be interpolated at any time.
class DegradedSensor {
 public:
  explicit DegradedSensor(SensorModel model);

  /// Appends `truth` at time `t` (non-decreasing) to the history and returns
  /// the measurement available at `t`.
  RigidBodyState observe(double t, const RigidBodyState& truth, Rng& rng);

  const SensorModel& model() const { return model_; }

 private:
  RigidBodyState delayed(double t_query) const;
  RigidBodyState corrupt(const RigidBodyState& s, Rng& rng) const;

  SensorModel model_;
  std::deque<std::pair<double, RigidBodyState>> history_;
  std::optional<long long> held_index_;
  RigidBodyState held_;
};

struct Actuation {
  Vector speeds;       // Hz, after lag and noise
  Vector u_effective;  // s |s| per rotor
};

/// Desired speed for a command u: sign(u) sqrt(|u|).
double commanded_speed(double u);

/// Clamp to the feasible range and snap to the 2^bits uniform grid.
double quantize_speed(double speed, const ActuatorModel& model);

/// Bank of first-order motors driven through a quantizing ESC.
class RotorBank {
 public:
  RotorBank(ActuatorModel model, int rotor_count);

  /// Sets the lag state to the quantized speeds of `u` (no start-up transient).
  void reset(const Vector& u);

  /// Quantize, advance the exact ZOH lag by dt, add speed-proportional noise.
  Actuation actuate(const Vector& u_commanded, double dt, Rng& rng);

  const Vector& lag_state() const { return speed_; }
  const ActuatorModel& model() const { return model_; }

 private:
  ActuatorModel model_;
  Vector speed_;
  bool initialized_ = false;
};

struct Scenario {
  Vec3 p_r = Vec3::Zero();
  std::optional<Quaternion> q_r;
  RigidBodyState initial;
  double duration = 10.0;        // s
  std::optional<SensorModel> sensor;      // absent: perfect state feedback
  std::optional<ActuatorModel> actuator;  // absent: u applied exactly
  std::uint64_t seed = 1;
  double physics_dt = 1e-3;      // s
  double control_rate = 500.0;   // Hz, must be an integer divisor of 1/physics_dt
  int record_every = 10;         // physics steps between trace rows
};

struct SimResult {
  SimTrace trace;
  std::optional<ErrorCode> error;
  std::string error_message;

  bool ok() const { return !error.has_value(); }
};

/// Runs one closed-loop experiment. Controller faults and integration
/// blow-ups end the run early; the partial trace is kept.
SimResult run_scenario(const HoverController& controller, const Scenario& scenario);

}  // namespace zmd
