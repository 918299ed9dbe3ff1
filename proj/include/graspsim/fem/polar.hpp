#pragma once

#include <stdexcept>

#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::fem {

class InvertedElementError : public std::runtime_error {
 public:
  explicit InvertedElementError(double det);
  double determinant() const { return det_; }

 private:
  double det_;
};

/// Rotation factor R of the polar decomposition F = R S (det R = +1).
/// Throws InvertedElementError when det(F) <= 0.
Mat3 polar_rotation(const Mat3& F);

/// Rotation and symmetric stretch of F, tolerant to inversion. When det(F) <= 0
/// the smallest singular direction is reflected so R stays proper, and any
/// stretch value below 1e-8 is clamped to 1e-8.
struct CorotatedFrame {
  Mat3 rotation;
  Mat3 stretch;
  bool inverted = false;
};

CorotatedFrame corotated_frame(const Mat3& F);

}  // namespace graspsim::fem
