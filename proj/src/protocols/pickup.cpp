#include "graspsim/protocols/pickup.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

namespace graspsim::protocols {

PickupOutcome run_pickup(const fem::FemModel& model, const sampler::GraspPose& grasp, const ProtocolConfig& config) {
  PickupOutcome out;
  ProtocolResult& r = out.result;
  r.test = TestId::pickup;

  contact::GraspWorld world = make_world(model, grasp, config);
  r.snapshots.push_back(capture_fields(world, "pre_contact"));
  const double target = config.pickup_force(model.total_mass(), model.material().friction);
  contact::ForceController controller(target, config.squeeze.controller);

  try {
    SqueezeCapture capture;
    try {
      capture.trajectory = contact::squeeze_to_force(world, controller, config.squeeze);
    } catch (const contact::SqueezeFailure& e) {
      spdlog::debug("grasp {}: {}", grasp.id, e.what());
      r.reason = "squeeze";
      return out;
    }
    capture.target = target;
    capture.contacts = world.contacts();
    capture.positions = world.state().positions;
    capture.gripper = world.gripper();
    capture.center_of_mass = world.center_of_mass();
    out.capture = std::move(capture);

    if (!lower_platform(world, controller, config)) {
      r.reason = "dropped";
      return out;
    }

    const long hold_steps = std::lround(config.hold_time / config.dt);
    const double hold_start = world.state().time;
    LossDetector loss(config.loss_debounce_steps);
    for (long n = 0; n < hold_steps; ++n) {
      world.step();
      controller.update(world);
      if (loss.update(world.contacts(), n)) {
        spdlog::debug("grasp {}: contact lost {:.3f} s into the hold", grasp.id, world.state().time - hold_start);
        r.reason = "dropped";
        r.values = {static_cast<double>(n + 1) * config.dt};
        return out;
      }
    }
    r.values = {static_cast<double>(hold_steps) * config.dt};
    r.snapshots.push_back(capture_fields(world, "post_pickup"));
    out.final_world = world.snapshot();
    r.success = true;
  } catch (const fem::StepFailure& e) {
    spdlog::warn("grasp {}: pickup simulation failed: {}", grasp.id, e.what());
    r.reason = "sim";
  }
  return out;
}

}  // namespace graspsim::protocols
