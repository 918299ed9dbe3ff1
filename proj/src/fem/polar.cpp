#include "graspsim/fem/polar.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace graspsim::fem {

InvertedElementError::InvertedElementError(double det)
    : std::runtime_error("inverted element: det(F) = " + std::to_string(det)), det_(det) {}

namespace {

constexpr double kMinStretch = 1e-8;

}  // namespace

namespace {

// Scaled Newton iteration X <- (zeta X + X^-T / zeta) / 2 for well-conditioned
// F with det(F) > 0. Returns false if it fails to settle.
bool newton_polar(const Mat3& F, Mat3& rotation) {
  Mat3 x = F;
  for (int it = 0; it < 30; ++it) {
    const double det = x.determinant();
    if (!(det > 0.0)) return false;
    const Mat3 inv_t = x.inverse().transpose();
    const double zeta = std::cbrt(1.0 / det);
    const Mat3 next = 0.5 * (zeta * x + inv_t / zeta);
    const double change = (next - x).squaredNorm();
    x = next;
    if (change < 1e-28) {
      rotation = x;
      return true;
    }
  }
  return false;
}

}  // namespace

CorotatedFrame corotated_frame(const Mat3& F) {
  const double det = F.determinant();
  const double scale = F.squaredNorm();
  if (det > 1e-6 * scale * std::sqrt(scale)) {
    CorotatedFrame frame;
    if (newton_polar(F, frame.rotation)) {
      const Mat3 s = frame.rotation.transpose() * F;
      frame.stretch = 0.5 * (s + s.transpose());
      return frame;
    }
  }

  Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Vec3 sigma = svd.singularValues();

  CorotatedFrame frame;
  if (u.determinant() * v.determinant() < 0.0) {
    // Singular values are sorted descending; reflect the weakest direction.
    u.col(2) *= -1.0;
    sigma(2) *= -1.0;
  }
  frame.inverted = F.determinant() <= 0.0;
  for (int i = 0; i < 3; ++i) sigma(i) = std::max(sigma(i), kMinStretch);
  frame.rotation = u * v.transpose();
  frame.stretch = v * sigma.asDiagonal() * v.transpose();
  return frame;
}

Mat3 polar_rotation(const Mat3& F) {
  const double det = F.determinant();
  if (!(det > 0.0)) throw InvertedElementError(det);
  return corotated_frame(F).rotation;
}

}  // namespace graspsim::fem
