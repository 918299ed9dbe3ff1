#include "graspsim/contact/gripper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graspsim::contact {

const char* to_string(Body body) {
  switch (body) {
    case Body::left:
      return "left";
    case Body::right:
      return "right";
    case Body::platform:
      return "platform";
  }
  return "?";
}

GripperState GripperState::from_axes(const Vec3& center, const Vec3& approach, const Vec3& roll, double separation,
                                     const PadGeometry& pad, double max_opening) {
  const Vec3 a = approach.normalized();
  const Vec3 r = (roll - roll.dot(a) * a).normalized();
  if (!a.allFinite() || !r.allFinite()) throw std::invalid_argument("degenerate gripper axes");
  GripperState g;
  g.rotation.col(0) = a;
  g.rotation.col(1) = r;
  g.rotation.col(2) = a.cross(r);
  g.center = center;
  g.pad = pad;
  g.max_opening = max_opening;
  const double s = std::clamp(separation, 0.0, max_opening);
  g.offset = {0.5 * s, 0.5 * s};
  return g;
}

Vec3 GripperState::inward_normal(Body finger) const {
  return finger == Body::left ? approach() : Vec3(-approach());
}

Vec3 GripperState::face_center(Body finger) const {
  const int f = static_cast<int>(finger);
  return center - offset[f] * inward_normal(finger);
}

Vec3 GripperState::pad_center(Body finger) const {
  return face_center(finger) - pad.half_thickness * inward_normal(finger);
}

Vec3 GripperState::midpoint() const { return 0.5 * (face_center(Body::left) + face_center(Body::right)); }

std::array<Vec3, 2> GripperState::distal_edge(Body finger) const {
  const Vec3 tip = face_center(finger) + pad.half_length * roll();
  return {tip - pad.half_width * binormal(), tip + pad.half_width * binormal()};
}

SignedDistance finger_signed_distance(const Vec3& p, const GripperState& gripper, Body finger) {
  if (finger == Body::platform) throw std::invalid_argument("platform is not a finger");
  const Vec3 c = gripper.pad_center(finger);
  const Vec3 h(gripper.pad.half_thickness, gripper.pad.half_length, gripper.pad.half_width);
  const Vec3 q = gripper.rotation.transpose() * (p - c);
  const Vec3 excess = q.cwiseAbs() - h;

  SignedDistance out;
  if ((excess.array() > 0.0).any()) {
    const Vec3 clamped = q.cwiseMax(-h).cwiseMin(h);
    const Vec3 diff = q - clamped;
    out.distance = diff.norm();
    out.normal = gripper.rotation * (diff / out.distance);
    out.closest = c + gripper.rotation * clamped;
  } else {
    int axis = 0;
    excess.maxCoeff(&axis);
    const double sign = q(axis) >= 0.0 ? 1.0 : -1.0;
    out.distance = excess(axis);
    out.normal = sign * gripper.rotation.col(axis);
    Vec3 surface = q;
    surface(axis) = sign * h(axis);
    out.closest = c + gripper.rotation * surface;
  }
  return out;
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace graspsim::contact
