#include <cmath>

#include "zmd/simkit.hpp"

namespace zmd {

namespace {

RigidBodyState lerp(const RigidBodyState& a, const RigidBodyState& b, double w) {
  RigidBodyState s;
  s.p = (1.0 - w) * a.p + w * b.p;
  s.v = (1.0 - w) * a.v + w * b.v;
  s.omega = (1.0 - w) * a.omega + w * b.omega;
  s.q = normalized(Quaternion::from_vec4((1.0 - w) * a.q.as_vec4() + w * b.q.as_vec4()));
  return s;
}

}  // namespace

void SensorModel::validate() const {
  const bool ok = std_p >= 0.0 && std_v >= 0.0 && std_q >= 0.0 && std_omega >= 0.0 &&
                  delay >= 0.0 && std::isfinite(sensor_rate);
  if (!ok) {
    throw Error(ErrorCode::invalid_argument, "sensor noise levels and delay must be >= 0");
  }
}

DegradedSensor::DegradedSensor(SensorModel model) : model_(model) { model_.validate(); }

RigidBodyState DegradedSensor::delayed(double t_query) const {
  if (t_query <= history_.front().first) return history_.front().second;
  for (std::size_t i = history_.size() - 1; i > 0; --i) {
    const auto& [t0, s0] = history_[i - 1];
    const auto& [t1, s1] = history_[i];
    if (t_query >= t0) {
      if (t_query >= t1) return s1;
      return lerp(s0, s1, (t_query - t0) / (t1 - t0));
    }
  }
  return history_.front().second;
}

RigidBodyState DegradedSensor::corrupt(const RigidBodyState& s, Rng& rng) const {
  std::normal_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double std) -> Vec3 {
    const double x = unit(rng), y = unit(rng), z = unit(rng);
    return Vec3(x, y, z) * std;
  };
  RigidBodyState out = s;
  out.p += draw(model_.std_p);
  out.v += draw(model_.std_v);
  const Vec3 dq = draw(model_.std_q);
  if (model_.std_q > 0.0) out.q = normalized(product(s.q, from_rotation_vector(dq)));
  out.omega += draw(model_.std_omega);
  return out;
}

RigidBodyState DegradedSensor::observe(double t, const RigidBodyState& truth, Rng& rng) {
  history_.emplace_back(t, truth);
  // Keep one sample at or before t - delay for interpolation.
  while (history_.size() > 2 && history_[1].first <= t - model_.delay) {
    history_.pop_front();
  }
  if (model_.sensor_rate <= 0.0) {
    held_ = corrupt(delayed(t - model_.delay), rng);
    return held_;
  }
  const auto index = static_cast<long long>(std::floor(t * model_.sensor_rate + 1e-9));
  if (!held_index_ || index != *held_index_) {
    held_index_ = index;
    held_ = corrupt(delayed(t - model_.delay), rng);
  }
  return held_;
}

}  // namespace zmd
