#pragma once

#include <numbers>
#include <vector>

#include "graspsim/contact/squeeze.hpp"

namespace graspsim::protocols {

/// Jerk-limited ramp min(jerk * t, cap).
inline double ramp(double jerk, double cap, double t) { return t * jerk < cap ? t * jerk : cap; }

/// Integral of ramp() from 0 to t.
double ramp_integral(double jerk, double cap, double t);

/// Constants of the four test protocols. Defaults are the reference values;
/// the ones marked "chosen" are not given by the reference and are ours.
struct ProtocolConfig {
  double dt = 1.0 / 1500.0;
  double gravity = 9.81;
  /// F_p = safety * m g / mu.
  double squeeze_safety_factor = 1.3;

  // Pickup: the platform drops lowering_step every lowering_interval until it
  // is lowering_depth below its start (chosen), then the grasp holds.
  double lowering_step = 0.005;
  double lowering_interval = 0.1;
  double lowering_depth = 0.02;
  double hold_time = 5.0;

  // Reorientation: each axis x angle state is reached by turning gravity in
  // the gripper frame over slerp_time and then held for up to settle_time (chosen); the hold ends
  // early once every node is slower than settle_speed for settle_window steps
  // (settle_speed = 0 disables that).
  int reorientation_axes = 16;
  std::vector<double> reorientation_angles{std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4,
                                           std::numbers::pi};
  double slerp_time = 0.25;
  double settle_time = 0.5;
  double settle_speed = 1e-4;
  int settle_window = 15;

  // Linear and angular acceleration ramps.
  int acceleration_directions = 16;
  double linear_jerk = 1000.0;   // m/s^3
  double linear_cap = 50.0;      // m/s^2
  double angular_jerk = 2500.0;  // rad/s^3
  double angular_cap = 1000.0;   // rad/s^2
  /// Zero-gravity settle after freezing the joints, before the ramps (chosen).
  double pre_ramp_settle = 0.1;
  int min_valid_directions = 8;

  /// A finger has lost contact once its contact count stays 0 this many steps.
  int loss_debounce_steps = 10;

  contact::SqueezeOptions squeeze;
  contact::ContactParams contact;  // friction is taken from the material
  fem::StepOptions solver;

  bool run_reorientation = true;
  bool run_linear = true;
  bool run_angular = true;

  int num_reorientation_states() const {
    return reorientation_axes * static_cast<int>(reorientation_angles.size());
  }
  double pickup_force(double mass, double friction) const;

  /// Throws std::invalid_argument for non-physical values.
  void validate() const;
};

}  // namespace graspsim::protocols
