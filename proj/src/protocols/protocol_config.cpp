#include "graspsim/protocols/protocol_config.hpp"

#include <stdexcept>

namespace graspsim::protocols {

double ramp_integral(double jerk, double cap, double t) {
  const double t_cap = cap / jerk;
  if (t <= t_cap) return 0.5 * jerk * t * t;
  return 0.5 * jerk * t_cap * t_cap + cap * (t - t_cap);
}

double ProtocolConfig::pickup_force(double mass, double friction) const {
  if (!(friction > 0.0)) throw std::invalid_argument("friction coefficient must be positive");
  return squeeze_safety_factor * mass * gravity / friction;
}

void ProtocolConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(dt, "dt");
  positive(gravity, "gravity");
  positive(squeeze_safety_factor, "squeeze_safety_factor");
  positive(lowering_step, "lowering_step");
  positive(lowering_interval, "lowering_interval");
  positive(lowering_depth, "lowering_depth");
  positive(hold_time, "hold_time");
  positive(slerp_time, "slerp_time");
  positive(linear_jerk, "linear_jerk");
  positive(linear_cap, "linear_cap");
  positive(angular_jerk, "angular_jerk");
  positive(angular_cap, "angular_cap");
  if (settle_time < 0.0 || settle_speed < 0.0 || pre_ramp_settle < 0.0) {
    throw std::invalid_argument("settle times and speeds must be non-negative");
  }
  if (reorientation_axes < 1 || reorientation_angles.empty()) {
    throw std::invalid_argument("reorientation needs at least one axis and angle");
  }
  if (acceleration_directions < 1) throw std::invalid_argument("acceleration_directions must be positive");
  if (loss_debounce_steps < 1 || settle_window < 1) throw std::invalid_argument("step windows must be >= 1");
  if (min_valid_directions > acceleration_directions) {
    throw std::invalid_argument("min_valid_directions exceeds acceleration_directions");
  }
}

}  // namespace graspsim::protocols
