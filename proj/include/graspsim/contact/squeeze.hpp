#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "graspsim/contact/world.hpp"

namespace graspsim::contact {

/// First-order IIR low-pass: y <- (1 - alpha) y + alpha x, starting at 0.
class LowPassFilter {
 public:
  explicit LowPassFilter(double alpha = 0.1);
  double update(double x);
  double value() const { return y_; }
  void reset(double y = 0.0) { y_ = y; }
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  double y_ = 0.0;
};

struct ControllerOptions {
  double filter_alpha = 0.1;
  double approach_speed = 0.01;  // m/s per finger before contact
  double max_speed = 0.02;       // m/s per finger while regulating
  double gain = 0.05;            // fraction of the force error corrected per step
  double initial_stiffness = 1e3;  // N/m, first secant estimate
  double tolerance = 0.05;       // relative band around the target
  int settle_steps = 50;         // consecutive in-band steps for convergence
};

/// Per-finger admittance force controller. Before contact a finger closes at
/// the approach speed; afterwards it moves by gain * error / k, where k is a
/// running secant estimate of the finger's contact stiffness. Runs after each
/// world step and sets the finger offsets for the next one.
class ForceController {
 public:
  ForceController(double target, ControllerOptions options = {});

  void set_target(double target);
  double target() const { return target_; }
  const ControllerOptions& options() const { return options_; }

  /// Reads the world's contacts, updates filters and moves the fingers.
  void update(GraspWorld& world);

  /// Both filtered forces inside the band for settle_steps consecutive updates.
  bool converged() const { return in_band_ >= options_.settle_steps; }
  const std::array<LowPassFilter, 2>& filters() const { return filters_; }

 private:
  double target_;
  ControllerOptions options_;
  std::array<LowPassFilter, 2> filters_;
  std::array<double, 2> stiffness_;
  std::array<double, 2> last_force_{0.0, 0.0};
  std::array<double, 2> last_offset_{0.0, 0.0};
  std::array<bool, 2> touched_{false, false};
  int in_band_ = 0;
};

struct SqueezeSample {
  double time = 0.0;
  double separation = 0.0;
  std::array<double, 2> raw_force{0.0, 0.0};
  std::array<double, 2> filtered_force{0.0, 0.0};
};

struct SqueezeTrajectory {
  std::vector<SqueezeSample> samples;
  /// Separation when both fingers first touched the object; negative if never.
  double separation_at_first_contact = -1.0;
  double separation_at_target = -1.0;
  int steps = 0;
};

struct SqueezeOptions {
  ControllerOptions controller;
  double max_time = 4.0;  // s of simulated time before giving up
};

class SqueezeFailure : public std::runtime_error {
 public:
  enum class Reason { crush, budget };
  SqueezeFailure(Reason reason, SqueezeTrajectory trajectory);
  Reason reason() const { return reason_; }
  const SqueezeTrajectory& trajectory() const { return trajectory_; }

 private:
  Reason reason_;
  SqueezeTrajectory trajectory_;
};

/// Closes the gripper until both fingers hold `target` N (filtered) in the
/// tolerance band. Throws SqueezeFailure on crush (separation reaches 0) or
/// when max_time elapses, and fem::StepFailure from the solver.
SqueezeTrajectory squeeze_to_force(GraspWorld& world, ForceController& controller, const SqueezeOptions& options);

SqueezeTrajectory squeeze_to_force(GraspWorld& world, double target, const SqueezeOptions& options = {});

}  // namespace graspsim::contact
