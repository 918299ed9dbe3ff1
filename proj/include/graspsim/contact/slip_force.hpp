#pragma once

#include "graspsim/contact/contact_model.hpp"

namespace graspsim::contact {

inline constexpr double kStandardGravity = 9.81;
inline constexpr double kSqueezeSafetyFactor = 1.3;

/// Squeeze force whose friction carries the object's weight with the 1.3
/// safety factor: 1.3 m g / mu. Throws for mu <= 0 or m < 0.
double required_squeeze_force(double mass, double friction, double gravity = kStandardGravity);

struct SlipForceEstimate {
  double force = 0.0;        // N
  double lever_arm = 0.0;    // m, COM distance from the grasp line
  double half_span = 0.0;    // m, mean half distance between each patch's extreme points
  bool degenerate = false;   // half_span under 1 mm, force = 2 F_p
};

/// Squeeze force that also resists rotational slip: each finger patch is
/// reduced to its two extreme contact points along the roll axis, and friction
/// at half-span D must balance m g r about the grasp line:
/// max(F_p, m g r / (mu D)). Throws std::invalid_argument when a finger has no
/// contact.
SlipForceEstimate estimate_slip_force(const ContactSet& contacts, const std::vector<Vec3>& positions,
                                      const Vec3& com, double mass, double friction, const GripperState& gripper,
                                      double gravity = kStandardGravity);

/// The moment-balance term alone, m g r / (mu D).
double slip_moment_force(double mass, double gravity, double lever_arm, double friction, double half_span);

}  // namespace graspsim::contact
