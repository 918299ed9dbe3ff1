#include "graspsim/contact/slip_force.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace graspsim::contact {

double required_squeeze_force(double mass, double friction, double gravity) {
  if (!(friction > 0.0)) throw std::invalid_argument("friction coefficient must be positive");
  if (mass < 0.0) throw std::invalid_argument("mass must be non-negative");
  return kSqueezeSafetyFactor * mass * gravity / friction;
}

double slip_moment_force(double mass, double gravity, double lever_arm, double friction, double half_span) {
  if (!(friction > 0.0) || !(half_span > 0.0)) throw std::invalid_argument("friction and span must be positive");
  return mass * gravity * lever_arm / (friction * half_span);
}

SlipForceEstimate estimate_slip_force(const ContactSet& contacts, const std::vector<Vec3>& positions,
                                      const Vec3& com, double mass, double friction, const GripperState& gripper,
                                      double gravity) {
  const double fp = required_squeeze_force(mass, friction, gravity);
  const Vec3 roll = gripper.roll();
  const Vec3 axis = gripper.approach();

  std::array<Vec3, 2> centers;
  double span_sum = 0.0;
  for (Body finger : kFingers) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    Vec3 weighted = Vec3::Zero();
    double total = 0.0;
    for (const Contact& c : contacts.contacts) {
      if (c.body != finger || c.normal_force <= 0.0) continue;
      const Vec3& p = positions[c.node];
      lo = std::min(lo, p.dot(roll));
      hi = std::max(hi, p.dot(roll));
      weighted += c.normal_force * p;
      total += c.normal_force;
    }
    if (total <= 0.0) throw std::invalid_argument(std::string("no contact on finger ") + to_string(finger));
    centers[static_cast<int>(finger)] = weighted / total;
    span_sum += 0.5 * (hi - lo);
  }

  SlipForceEstimate out;
  const Vec3 through = 0.5 * (centers[0] + centers[1]);
  const Vec3 rel = com - through;
  out.lever_arm = (rel - rel.dot(axis) * axis).norm();
  out.half_span = 0.5 * span_sum;
  if (out.half_span < 1e-3) {
    out.degenerate = true;
    out.force = 2.0 * fp;
    spdlog::info("contact patch span {:.3g} m below 1 mm; slip force falls back to 2 F_p", out.half_span);
    return out;
  }
  out.force = std::max(fp, slip_moment_force(mass, gravity, out.lever_arm, friction, out.half_span));
  return out;
}

}  // namespace graspsim::contact
