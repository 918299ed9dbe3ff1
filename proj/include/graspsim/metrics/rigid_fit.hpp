#pragma once

#include <vector>

#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::metrics {

/// Least-squares rigid transform taking `from` onto `to`: minimizes
/// sum |R from_i + t - to_i|^2 over proper rotations R (det = +1).
struct RigidFit {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

/// SVD (Kabsch) solution with the reflection case corrected. Throws
/// std::invalid_argument for unequal sizes or fewer than 3 non-collinear
/// points, where the rotation is not unique.
RigidFit fit_rigid(const std::vector<Vec3>& from, const std::vector<Vec3>& to);

struct Deformation {
  double max = 0.0;               // m, largest residual norm
  std::vector<Vec3> residual;     // post - fit(pre), per node
};

/// Deformation of `post` relative to `pre` after removing the best rigid
/// motion. Zero for any rigid motion; invariant to a rigid transform applied
/// to both inputs.
Deformation max_deformation(const std::vector<Vec3>& pre, const std::vector<Vec3>& post);

}  // namespace graspsim::metrics
