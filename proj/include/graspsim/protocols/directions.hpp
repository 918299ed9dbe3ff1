#pragma once

#include <vector>

#include <Eigen/Geometry>

#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::protocols {

/// `n` spherical-Fibonacci points: z_i = 1 - (2i + 1)/n, azimuth i times the
/// golden angle. Unit length to rounding.
std::vector<Vec3> make_directions(int n = 16);

/// Smallest angle between any two of the vectors, rad.
double min_pairwise_angle(const std::vector<Vec3>& directions);

/// One target orientation: rotation by `angle` about `axis`.
struct ReorientationState {
  int index = 0;
  int axis_index = 0;
  Vec3 axis = Vec3::UnitZ();
  double angle = 0.0;
  Eigen::Quaterniond rotation() const { return Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis)); }
};

/// Every (axis, angle) pair, axis-major.
std::vector<ReorientationState> reorientation_states(const std::vector<Vec3>& axes, const std::vector<double>& angles);

}  // namespace graspsim::protocols
