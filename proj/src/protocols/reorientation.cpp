#include "graspsim/protocols/reorientation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>
#include <spdlog/spdlog.h>

#include "graspsim/protocols/directions.hpp"

namespace graspsim::protocols {

Vec3 rotated_gravity(const Vec3& gravity, const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(-angle, axis.normalized()) * gravity;
}

namespace {

double max_speed(const fem::SimState& s) {
  double v = 0.0;
  for (const Vec3& u : s.velocities) v = std::max(v, u.squaredNorm());
  return std::sqrt(v);
}

// Turns the gripper to `state` and holds it. The turn is quasi-static: only
// the gravity direction changes (smoothstep in angle), with no fictitious
// forces from the turn itself. Returns false when the grasp lost contact.
bool visit_state(contact::GraspWorld& world, const ReorientationState& state, const Vec3& g0,
                 const ProtocolConfig& config) {
  LossDetector loss(config.loss_debounce_steps);
  const Vec3 u = state.axis;
  const double total = state.angle;
  const long turn_steps = std::max(1L, std::lround(config.slerp_time / config.dt));
  long n = 0;
  for (long k = 1; k <= turn_steps; ++k, ++n) {
    const double tau = static_cast<double>(k) / static_cast<double>(turn_steps);
    world.gravity = rotated_gravity(g0, u, total * tau * tau * (3.0 - 2.0 * tau));
    world.step();
    if (loss.update(world.contacts(), n)) return false;
  }

  world.gravity = rotated_gravity(g0, u, total);
  const long settle_steps = std::lround(config.settle_time / config.dt);
  int quiet = 0;
  for (long k = 0; k < settle_steps; ++k, ++n) {
    world.step();
    if (loss.update(world.contacts(), n)) return false;
    if (config.settle_speed > 0.0) {
      quiet = max_speed(world.state()) < config.settle_speed ? quiet + 1 : 0;
      if (quiet >= config.settle_window) break;
    }
  }
  return true;
}

}  // namespace

ProtocolResult run_reorientation(const fem::FemModel& model, const sampler::GraspPose& grasp,
                                 const ProtocolConfig& config, double squeeze_force) {
  ProtocolResult r;
  r.test = TestId::reorient;
  contact::GraspWorld world = make_world(model, grasp, config);
  contact::ForceController controller(squeeze_force, config.squeeze.controller);
  try {
    contact::squeeze_to_force(world, controller, config.squeeze);
    if (!lower_platform(world, controller, config)) {
      r.reason = "dropped";
      return r;
    }
  } catch (const contact::SqueezeFailure& e) {
    spdlog::debug("grasp {}: reorientation squeeze: {}", grasp.id, e.what());
    r.reason = "squeeze";
    return r;
  } catch (const fem::StepFailure& e) {
    spdlog::warn("grasp {}: reorientation setup failed: {}", grasp.id, e.what());
    r.reason = "sim";
    return r;
  }
  world.gripper().joint_frozen = true;
  world.platform().reset();
  const contact::WorldSnapshot base = world.snapshot();

  const auto states = reorientation_states(make_directions(config.reorientation_axes), config.reorientation_angles);
  int dropped = 0;
  for (const ReorientationState& s : states) {
    world.restore(base);
    bool held = false;
    try {
      held = visit_state(world, s, base.gravity, config);
    } catch (const fem::StepFailure& e) {
      spdlog::warn("grasp {}: reorientation state {} failed: {}", grasp.id, s.index, e.what());
    }
    r.values.push_back(s.angle);
    r.valid.push_back(held ? 1 : 0);
    if (held) {
      r.snapshots.push_back(capture_fields(world, "state_" + std::to_string(s.index)));
    } else {
      ++dropped;
    }
  }
  if (dropped > 0) spdlog::debug("grasp {}: {} reorientation state(s) dropped", grasp.id, dropped);
  r.success = true;
  return r;
}

}  // namespace graspsim::protocols
