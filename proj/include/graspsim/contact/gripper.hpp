#pragma once

#include <array>

#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::contact {

enum class Body { left = 0, right = 1, platform = 2 };

inline constexpr std::array<Body, 2> kFingers{Body::left, Body::right};

const char* to_string(Body body);

/// Box pad half extents: along the approach axis (thickness), the roll axis
/// (finger length, distal edge at +half_length) and the third axis (width).
struct PadGeometry {
  double half_thickness = 0.004;
  double half_length = 0.01;
  double half_width = 0.01;
};

/// Parallel-jaw gripper. The frame columns are (approach, roll, approach x roll).
/// Finger `left` sits on the -approach side with its inner face at
/// center - offset[left] * approach; `right` mirrors it.
struct GripperState {
  Mat3 rotation = Mat3::Identity();
  Vec3 center = Vec3::Zero();
  std::array<double, 2> offset{0.04, 0.04};
  PadGeometry pad;
  double max_opening = 0.08;
  bool joint_frozen = false;
  /// Filtered total normal force per finger, N.
  std::array<double, 2> measured_force{0.0, 0.0};

  /// Gripper at `center` whose fingers close along `approach`, opened
  /// symmetrically to `separation` (clamped to [0, max_opening]).
  static GripperState from_axes(const Vec3& center, const Vec3& approach, const Vec3& roll, double separation,
                                const PadGeometry& pad = {}, double max_opening = 0.08);

  double separation() const { return offset[0] + offset[1]; }
  Vec3 approach() const { return rotation.col(0); }
  Vec3 roll() const { return rotation.col(1); }
  Vec3 binormal() const { return rotation.col(2); }

  /// Unit normal of a finger's inner face, pointing into the gap.
  Vec3 inward_normal(Body finger) const;
  /// Center of a finger's inner face.
  Vec3 face_center(Body finger) const;
  /// Center of a finger's pad box.
  Vec3 pad_center(Body finger) const;
  /// Midpoint between the two inner face centers.
  Vec3 midpoint() const;
  /// Endpoints of the distal edge of a finger's inner face.
  std::array<Vec3, 2> distal_edge(Body finger) const;
};

struct SignedDistance {
  double distance = 0.0;  // negative inside the pad
  Vec3 normal = Vec3::UnitX();
  Vec3 closest = Vec3::Zero();  // closest point on the pad surface
};

SignedDistance finger_signed_distance(const Vec3& p, const GripperState& gripper, Body finger);

/// Distance from `p` to the segment [a, b].
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

}  // namespace graspsim::contact
