#include "graspsim/metrics/rigid_fit.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace graspsim::metrics {

RigidFit fit_rigid(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  if (from.size() != to.size()) throw std::invalid_argument("rigid fit needs equal point counts");
  if (from.size() < 3) throw std::invalid_argument("rigid fit needs at least 3 points");

  const double n = static_cast<double>(from.size());
  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    ca += from[i];
    cb += to[i];
  }
  ca /= n;
  cb /= n;

  Mat3 cov = Mat3::Zero();
  Mat3 spread = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Vec3 a = from[i] - ca;
    cov += (to[i] - cb) * a.transpose();
    spread += a * a.transpose();
  }
  // Collinear (or coincident) source points leave a rotation about their line free.
  const Eigen::SelfAdjointEigenSolver<Mat3> shape(spread);
  const double extent = shape.eigenvalues()(2);
  if (!(extent > 0.0) || shape.eigenvalues()(1) <= 1e-12 * extent)
    throw std::invalid_argument("rigid fit needs 3 non-collinear points");

  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d(2, 2) = -1.0;

  RigidFit fit;
  fit.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  fit.translation = cb - fit.rotation * ca;
  return fit;
}

Deformation max_deformation(const std::vector<Vec3>& pre, const std::vector<Vec3>& post) {
  const RigidFit fit = fit_rigid(pre, post);
  Deformation out;
  out.residual.resize(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    out.residual[i] = post[i] - fit.apply(pre[i]);
    out.max = std::max(out.max, out.residual[i].norm());
  }
  return out;
}

}  // namespace graspsim::metrics
