#pragma once

#include "graspsim/protocols/session.hpp"

namespace graspsim::protocols {

struct PickupOutcome {
  ProtocolResult result;
  /// Present once the squeeze converged.
  std::optional<SqueezeCapture> capture;
  /// World at the end of a successful hold; the acceleration tests start here.
  std::optional<contact::WorldSnapshot> final_world;
};

/// Squeeze to F_p, lower the platform, hold. Snapshots: "pre_contact" always,
/// "post_pickup" on success. Failure reasons: squeeze (including crush),
/// dropped, sim. values[0] is the simulated hold time reached.
PickupOutcome run_pickup(const fem::FemModel& model, const sampler::GraspPose& grasp, const ProtocolConfig& config);

}  // namespace graspsim::protocols
