#pragma once

#include "graspsim/protocols/session.hpp"

namespace graspsim::protocols {

/// Squeeze to `squeeze_force` (F_slip), lower the platform and freeze the
/// joints, then visit every reorientation state independently from that
/// pose: gravity is turned about the state axis in the gripper frame, then
/// held. Completed states are snapshots
/// labelled "state_<index>"; a state whose grasp loses contact is marked
/// invalid. Fails only if the squeeze or the initial lowering fails.
ProtocolResult run_reorientation(const fem::FemModel& model, const sampler::GraspPose& grasp,
                                 const ProtocolConfig& config, double squeeze_force);

/// Gravity direction in the gripper frame after the gripper turned by
/// `angle` about `axis`.
Vec3 rotated_gravity(const Vec3& gravity, const Vec3& axis, double angle);

}  // namespace graspsim::protocols
