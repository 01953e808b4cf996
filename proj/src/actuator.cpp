#include <algorithm>
#include <cmath>

#include "zmd/simkit.hpp"

namespace zmd {

void ActuatorModel::validate() const {
  const bool ok = speed_min >= 0.0 && speed_max > speed_min && quant_bits >= 0 &&
                  quant_bits <= 30 && motor_time_constant >= 0.0 && speed_noise_coeff >= 0.0;
  if (!ok) {
    throw Error(ErrorCode::invalid_argument, "invalid actuator model");
  }
}

double ActuatorModel::quantization_step() const {
  if (quant_bits == 0) return 0.0;
  return (speed_max - speed_min) / std::ldexp(1.0, quant_bits);
}

double commanded_speed(double u) { return std::copysign(std::sqrt(std::abs(u)), u); }

double quantize_speed(double speed, const ActuatorModel& model) {
  // Rotors cannot reverse: a negative command saturates at speed_min.
  const double clamped = std::clamp(speed, model.speed_min, model.speed_max);
  const double step = model.quantization_step();
  if (step == 0.0) return clamped;
  const double level = std::round((clamped - model.speed_min) / step);
  return std::min(model.speed_min + level * step, model.speed_max);
}

RotorBank::RotorBank(ActuatorModel model, int rotor_count)
    : model_(model), speed_(Vector::Zero(rotor_count)) {
  model_.validate();
}

void RotorBank::reset(const Vector& u) {
  speed_.resize(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    speed_(i) = quantize_speed(commanded_speed(u(i)), model_);
  }
  initialized_ = true;
}

Actuation RotorBank::actuate(const Vector& u_commanded, double dt, Rng& rng) {
  if (u_commanded.size() != speed_.size()) {
    throw Error(ErrorCode::dimension_mismatch, "rotor command size mismatch");
  }
  if (!initialized_) reset(u_commanded);
  const double decay =
      model_.motor_time_constant > 0.0 ? std::exp(-dt / model_.motor_time_constant) : 0.0;
  std::normal_distribution<double> unit(0.0, 1.0);
  Actuation out{Vector(speed_.size()), Vector(speed_.size())};
  for (Eigen::Index i = 0; i < speed_.size(); ++i) {
    const double target = quantize_speed(commanded_speed(u_commanded(i)), model_);
    speed_(i) = target + (speed_(i) - target) * decay;
    const double s = speed_(i) + model_.speed_noise_coeff * std::abs(speed_(i)) * unit(rng);
    out.speeds(i) = s;
    out.u_effective(i) = s * std::abs(s);
  }
  return out;
}

}  // namespace zmd
