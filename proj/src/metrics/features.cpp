#include "graspsim/metrics/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace graspsim::metrics {

namespace {

double distance_to_line(const Vec3& p, const Vec3& origin, const Vec3& unit_dir) {
  const Vec3 d = p - origin;
  return (d - d.dot(unit_dir) * unit_dir).norm();
}

}  // namespace

void GraspFeatures::validate(double max_opening) const {
  for (double v : values()) {
    if (!std::isfinite(v) || v < 0.0) throw std::domain_error("grasp feature negative or not finite");
  }
  if (grav_align > std::numbers::pi / 2 + 1e-12) throw std::domain_error("grav_align above pi/2");
  if (gripper_sep > max_opening + 1e-12) throw std::domain_error("gripper_sep above the maximum opening");
}

Vec3 patch_center(const contact::ContactSet& contacts, contact::Body finger) {
  Vec3 weighted = Vec3::Zero();
  double total = 0.0;
  for (const contact::Contact& c : contacts.contacts) {
    if (c.body != finger || c.normal_force <= 0.0) continue;
    weighted += c.normal_force * c.point;
    total += c.normal_force;
  }
  if (total <= 0.0) throw FeatureError(std::string("finger ") + contact::to_string(finger) + " has no contact");
  return weighted / total;
}

double gravity_alignment(const Vec3& normal) {
  const double c = std::min(1.0, std::abs(normal.normalized().z()));
  return std::acos(c);
}

GraspFeatures compute_features(const contact::ContactSet& contacts, const contact::GripperState& gripper,
                               const Vec3& center_of_mass, const contact::SqueezeTrajectory& squeeze) {
  if (squeeze.separation_at_first_contact < 0.0 || squeeze.separation_at_target < 0.0)
    throw FeatureError("squeeze did not reach the target force");

  GraspFeatures f;
  for (contact::Body finger : contact::kFingers) {
    const Vec3 center = patch_center(contacts, finger);
    const auto edge = gripper.distal_edge(finger);
    f.pure_dist += 0.5 * (center - center_of_mass).norm();
    f.perp_dist += 0.5 * distance_to_line(center_of_mass, center, gripper.inward_normal(finger));
    f.edge_dist += 0.5 * contact::point_segment_distance(center, edge[0], edge[1]);
    f.num_contacts += 0.5 * contacts.count(finger);
  }
  f.squeeze_dist = std::max(0.0, squeeze.separation_at_first_contact - squeeze.separation_at_target);
  f.gripper_sep = squeeze.separation_at_target;
  f.grav_align = gravity_alignment(gripper.approach());
  return f;
}

}  // namespace graspsim::metrics
