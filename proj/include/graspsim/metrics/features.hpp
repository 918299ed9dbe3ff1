#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "graspsim/contact/squeeze.hpp"

namespace graspsim::metrics {

/// Pre-pickup descriptors of a grasp, taken once the squeeze reached F_p.
/// Per-finger quantities are averaged over the two fingers.
struct GraspFeatures {
  double pure_dist = 0.0;     // m, patch center to center of mass
  double perp_dist = 0.0;     // m, center of mass to the line through the patch center along the finger normal
  double num_contacts = 0.0;  // contact points per finger
  double edge_dist = 0.0;     // m, patch center to the pad's distal edge
  double squeeze_dist = 0.0;  // m, separation closed since first contact
  double gripper_sep = 0.0;   // m, separation at F_p
  double grav_align = 0.0;    // rad in [0, pi/2], finger normal vs vertical

  static constexpr std::array<const char*, 7> kNames{"pure_dist",   "perp_dist",   "num_contacts", "edge_dist",
                                                     "squeeze_dist", "gripper_sep", "grav_align"};
  std::array<double, 7> values() const {
    return {pure_dist, perp_dist, num_contacts, edge_dist, squeeze_dist, gripper_sep, grav_align};
  }

  /// Throws std::domain_error when a range invariant fails.
  void validate(double max_opening) const;
};

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Patch center of a finger: the normal-force-weighted centroid of its contact
/// points on the pad surface. Throws FeatureError without contacts.
Vec3 patch_center(const contact::ContactSet& contacts, contact::Body finger);

/// Throws FeatureError when a finger has no contact or the squeeze never
/// touched the object.
GraspFeatures compute_features(const contact::ContactSet& contacts, const contact::GripperState& gripper,
                               const Vec3& center_of_mass, const contact::SqueezeTrajectory& squeeze);

/// Angle between `normal` and the vertical, folded into [0, pi/2] because
/// the sign of a finger normal carries no information.
double gravity_alignment(const Vec3& normal);

}  // namespace graspsim::metrics
