#include "graspsim/protocols/session.hpp"

#include <algorithm>
#include <cmath>

namespace graspsim::protocols {

const char* to_string(TestId test) {
  switch (test) {
    case TestId::pickup: return "pickup";
    case TestId::reorient: return "reorient";
    case TestId::linear: return "linear";
    case TestId::angular: return "angular";
  }
  return "unknown";
}

std::string ProtocolResult::status() const { return success ? "success" : "fail(" + reason + ")"; }

const FieldSnapshot* ProtocolResult::find(const std::string& label) const {
  for (const FieldSnapshot& s : snapshots)
    if (s.label == label) return &s;
  return nullptr;
}

bool LossDetector::update(const contact::ContactSet& contacts, long step_index) {
  const bool lost = contacts.count(contact::Body::left) == 0 || contacts.count(contact::Body::right) == 0;
  if (!lost) {
    run_ = 0;
    return false;
  }
  if (run_ == 0) window_start_ = step_index;
  ++run_;
  return run_ >= debounce_;
}

contact::WorldOptions world_options(const fem::FemModel& model, const ProtocolConfig& config) {
  contact::WorldOptions options;
  options.dt = config.dt;
  options.contact = config.contact;
  options.contact.friction = model.material().friction;
  options.solver = config.solver;
  return options;
}

contact::GraspWorld make_world(const fem::FemModel& model, const sampler::GraspPose& grasp,
                               const ProtocolConfig& config) {
  grasp.validate();
  contact::GraspWorld world(
      model, contact::GripperState::from_axes(grasp.center, grasp.approach, grasp.roll, grasp.separation),
      world_options(model, config));
  world.platform() = model.mesh().min_corner().z();
  world.gravity = Vec3(0.0, 0.0, -config.gravity);
  return world;
}

FieldSnapshot capture_fields(const contact::GraspWorld& world, std::string label) {
  return {std::move(label), world.state().time, world.state().positions, world.state().element_stress};
}

bool lower_platform(contact::GraspWorld& world, contact::ForceController& controller,
                    const ProtocolConfig& config) {
  const double start = world.platform().value();
  const long drops = std::lround(config.lowering_depth / config.lowering_step);
  const long steps_per_drop = std::max(1L, std::lround(config.lowering_interval / config.dt));
  LossDetector loss(config.loss_debounce_steps);
  long n = 0;
  for (long k = 1; k <= drops; ++k) {
    world.platform() = start - static_cast<double>(k) * config.lowering_step;
    for (long s = 0; s < steps_per_drop; ++s, ++n) {
      world.step();
      controller.update(world);
      if (loss.update(world.contacts(), n)) return false;
    }
  }
  return true;
}

}  // namespace graspsim::protocols
