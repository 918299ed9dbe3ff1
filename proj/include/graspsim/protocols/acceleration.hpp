#pragma once

#include "graspsim/protocols/pickup.hpp"

namespace graspsim::protocols {

/// Ramp the gripper's linear acceleration along each direction (gravity off,
/// joints frozen) from the post-pickup state and record the acceleration at
/// which a finger loses contact, or the cap. values[i] is NaN when the
/// simulation failed for direction i.
ProtocolResult run_linear_acceleration(const fem::FemModel& model, const contact::WorldSnapshot& post_pickup,
                                       const ProtocolConfig& config, const std::vector<Vec3>& directions);

/// Same with angular acceleration about axes through the finger midpoint.
ProtocolResult run_angular_acceleration(const fem::FemModel& model, const contact::WorldSnapshot& post_pickup,
                                        const ProtocolConfig& config, const std::vector<Vec3>& axes);

/// Convenience forms that run the pickup first and use make_directions().
ProtocolResult run_linear_acceleration(const fem::FemModel& model, const sampler::GraspPose& grasp,
                                       const ProtocolConfig& config);
ProtocolResult run_angular_acceleration(const fem::FemModel& model, const sampler::GraspPose& grasp,
                                        const ProtocolConfig& config);

}  // namespace graspsim::protocols
