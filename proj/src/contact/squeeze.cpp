#include "graspsim/contact/squeeze.hpp"

#include <algorithm>
#include <cmath>

namespace graspsim::contact {

LowPassFilter::LowPassFilter(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("filter alpha must be in (0, 1]");
}

double LowPassFilter::update(double x) {
  y_ = (1.0 - alpha_) * y_ + alpha_ * x;
  return y_;
}

ForceController::ForceController(double target, ControllerOptions options)
    : target_(target),
      options_(options),
      filters_{LowPassFilter(options.filter_alpha), LowPassFilter(options.filter_alpha)},
      stiffness_{options.initial_stiffness, options.initial_stiffness} {
  set_target(target);
}

void ForceController::set_target(double target) {
  if (!(target > 0.0)) throw std::invalid_argument("squeeze target must be positive");
  target_ = target;
  in_band_ = 0;
}

void ForceController::update(GraspWorld& world) {
  GripperState& g = world.gripper();
  const ContactSet& contacts = world.contacts();
  const double dt = world.dt();
  bool in_band = true;

  for (Body finger : kFingers) {
    const int f = static_cast<int>(finger);
    const double raw = contacts.normal_force(finger);
    const double filtered = filters_[f].update(raw);
    g.measured_force[f] = filtered;
    in_band = in_band && std::abs(filtered - target_) <= options_.tolerance * target_;
    if (g.joint_frozen) continue;

    double& offset = g.offset[f];
    if (contacts.count(finger) == 0) {
      offset -= options_.approach_speed * dt;
      continue;
    }
    if (!touched_[f]) {
      touched_[f] = true;
      last_force_[f] = raw;
      last_offset_[f] = offset;
    }

    const double closed = last_offset_[f] - offset;
    if (std::abs(closed) > 1e-9) {
      const double k_meas = (raw - last_force_[f]) / closed;
      if (k_meas > 0.0) {
        stiffness_[f] = std::clamp(std::exp(0.8 * std::log(stiffness_[f]) + 0.2 * std::log(k_meas)), 10.0, 1e8);
      }
    }
    last_force_[f] = raw;
    last_offset_[f] = offset;

    const double limit = options_.max_speed * dt;
    offset -= std::clamp(options_.gain * (target_ - filtered) / stiffness_[f], -limit, limit);
  }

  const double excess = g.separation() - g.max_opening;
  if (excess > 0.0) {
    g.offset[0] -= 0.5 * excess;
    g.offset[1] -= 0.5 * excess;
  }
  in_band_ = in_band ? in_band_ + 1 : 0;
}

SqueezeFailure::SqueezeFailure(Reason reason, SqueezeTrajectory trajectory)
    : std::runtime_error(reason == Reason::crush ? "squeeze failed: fingers closed completely"
                                                 : "squeeze failed: force did not converge in time"),
      reason_(reason),
      trajectory_(std::move(trajectory)) {}

SqueezeTrajectory squeeze_to_force(GraspWorld& world, ForceController& controller, const SqueezeOptions& options) {
  SqueezeTrajectory traj;
  const long max_steps = std::lround(options.max_time / world.dt());
  for (long n = 0; n < max_steps; ++n) {
    world.step();
    const ContactSet& c = world.contacts();
    SqueezeSample sample;
    sample.time = world.state().time;
    sample.separation = world.gripper().separation();
    sample.raw_force = {c.normal_force(Body::left), c.normal_force(Body::right)};
    if (traj.separation_at_first_contact < 0.0 && c.count(Body::left) > 0 && c.count(Body::right) > 0) {
      traj.separation_at_first_contact = sample.separation;
    }

    controller.update(world);
    sample.filtered_force = world.gripper().measured_force;
    traj.samples.push_back(sample);
    traj.steps = static_cast<int>(n + 1);

    if (controller.converged()) {
      traj.separation_at_target = sample.separation;
      return traj;
    }
    if (world.gripper().separation() <= 0.0) throw SqueezeFailure(SqueezeFailure::Reason::crush, std::move(traj));
  }
  throw SqueezeFailure(SqueezeFailure::Reason::budget, std::move(traj));
}

SqueezeTrajectory squeeze_to_force(GraspWorld& world, double target, const SqueezeOptions& options) {
  ForceController controller(target, options.controller);
  return squeeze_to_force(world, controller, options);
}

}  // namespace graspsim::contact
