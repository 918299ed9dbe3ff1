#include "graspsim/protocols/acceleration.hpp"

#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "graspsim/protocols/directions.hpp"

namespace graspsim::protocols {

namespace {

ProtocolResult run_ramps(const fem::FemModel& model, const contact::WorldSnapshot& post_pickup,
                         const ProtocolConfig& config, const std::vector<Vec3>& directions, bool angular) {
  ProtocolResult r;
  r.test = angular ? TestId::angular : TestId::linear;
  const double jerk = angular ? config.angular_jerk : config.linear_jerk;
  const double cap = angular ? config.angular_cap : config.linear_cap;

  contact::GraspWorld world(model, post_pickup.gripper, world_options(model, config));
  world.restore(post_pickup);
  world.gripper().joint_frozen = true;
  world.gravity = Vec3::Zero();
  world.platform().reset();
  world.frame = {};

  try {
    const long settle_steps = std::lround(config.pre_ramp_settle / config.dt);
    LossDetector loss(config.loss_debounce_steps);
    for (long n = 0; n < settle_steps; ++n) {
      world.step();
      if (loss.update(world.contacts(), n)) {
        r.reason = "dropped";
        return r;
      }
    }
  } catch (const fem::StepFailure& e) {
    spdlog::warn("{} test: settle failed: {}", to_string(r.test), e.what());
    r.reason = "sim";
    return r;
  }
  const contact::WorldSnapshot base = world.snapshot();
  const Vec3 pivot = base.gripper.midpoint();

  // Steps until the ramp reaches the cap, plus room for a loss window that
  // starts right at the cap to complete.
  const long ramp_steps = static_cast<long>(std::ceil(cap / (jerk * config.dt) - 1e-9));
  const long max_steps = ramp_steps + config.loss_debounce_steps;

  int valid = 0;
  for (const Vec3& raw : directions) {
    const Vec3 d = raw.normalized();
    world.restore(base);
    LossDetector loss(config.loss_debounce_steps);
    double value = cap;
    bool ok = true;
    try {
      for (long n = 0; n < max_steps; ++n) {
        const double t = static_cast<double>(n + 1) * config.dt;
        const double a = ramp(jerk, cap, t);
        if (angular) {
          world.frame.origin = pivot;
          world.frame.angular_acceleration = a * d;
          world.frame.angular_velocity = ramp_integral(jerk, cap, t) * d;
        } else {
          world.frame.acceleration = a * d;
        }
        world.step();
        if (loss.update(world.contacts(), n)) {
          value = ramp(jerk, cap, static_cast<double>(loss.window_start() + 1) * config.dt);
          break;
        }
      }
    } catch (const fem::StepFailure& e) {
      spdlog::warn("{} test: direction ({:.3f}, {:.3f}, {:.3f}) failed: {}", to_string(r.test), d.x(), d.y(), d.z(),
                   e.what());
      ok = false;
    }
    r.values.push_back(ok ? value : std::numeric_limits<double>::quiet_NaN());
    r.valid.push_back(ok ? 1 : 0);
    valid += ok ? 1 : 0;
  }

  r.success = valid >= config.min_valid_directions;
  if (!r.success) r.reason = "insufficient";
  return r;
}

ProtocolResult after_pickup(const fem::FemModel& model, const sampler::GraspPose& grasp,
                            const ProtocolConfig& config, bool angular) {
  PickupOutcome pickup = run_pickup(model, grasp, config);
  if (!pickup.result.success) {
    ProtocolResult r;
    r.test = angular ? TestId::angular : TestId::linear;
    r.reason = "pickup";
    return r;
  }
  return run_ramps(model, *pickup.final_world, config, make_directions(config.acceleration_directions), angular);
}

}  // namespace

ProtocolResult run_linear_acceleration(const fem::FemModel& model, const contact::WorldSnapshot& post_pickup,
                                       const ProtocolConfig& config, const std::vector<Vec3>& directions) {
  return run_ramps(model, post_pickup, config, directions, false);
}

ProtocolResult run_angular_acceleration(const fem::FemModel& model, const contact::WorldSnapshot& post_pickup,
                                        const ProtocolConfig& config, const std::vector<Vec3>& axes) {
  return run_ramps(model, post_pickup, config, axes, true);
}

ProtocolResult run_linear_acceleration(const fem::FemModel& model, const sampler::GraspPose& grasp,
                                       const ProtocolConfig& config) {
  return after_pickup(model, grasp, config, false);
}

ProtocolResult run_angular_acceleration(const fem::FemModel& model, const sampler::GraspPose& grasp,
                                        const ProtocolConfig& config) {
  return after_pickup(model, grasp, config, true);
}

}  // namespace graspsim::protocols
