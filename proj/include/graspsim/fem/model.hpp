#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "graspsim/mesh/material.hpp"
#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::fem {

using Mat12 = Eigen::Matrix<double, 12, 12>;

using mesh::MaterialParams;

class DegenerateElementError : public std::runtime_error {
 public:
  explicit DegenerateElementError(std::size_t element);
  std::size_t element() const { return element_; }

 private:
  std::size_t element_;
};

/// Linear elastic precomputation for corotational simulation. Immutable and
/// safe to share between threads.
class FemModel {
 public:
  FemModel(std::shared_ptr<const mesh::TetMesh> mesh, MaterialParams material);

  const mesh::TetMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const mesh::TetMesh> mesh_ptr() const { return mesh_; }
  const MaterialParams& material() const { return material_; }

  /// Inverse of the rest edge matrix [X1-X0, X2-X0, X3-X0].
  const Mat3& rest_inverse(std::size_t e) const { return rest_inverses_[e]; }
  /// Rest-frame 12x12 stiffness, node-major (node a, component i) -> 3a+i.
  const Mat12& element_stiffness(std::size_t e) const { return element_stiffness_[e]; }
  double rest_volume(std::size_t e) const { return volumes_[e]; }

  const std::vector<double>& lumped_masses() const { return lumped_masses_; }
  double total_mass() const { return total_mass_; }
  std::size_t num_dofs() const { return 3 * mesh_->num_nodes(); }

  /// Force scale for Newton termination (weight of the body under standard gravity).
  double characteristic_force() const { return total_mass_ * 9.81; }

 private:
  std::shared_ptr<const mesh::TetMesh> mesh_;
  MaterialParams material_;
  std::vector<Mat3> rest_inverses_;
  std::vector<Mat12> element_stiffness_;
  std::vector<double> volumes_;
  std::vector<double> lumped_masses_;
  double total_mass_ = 0.0;
};

FemModel build_model(std::shared_ptr<const mesh::TetMesh> mesh, const MaterialParams& material);
FemModel build_model(const mesh::TetMesh& mesh, const MaterialParams& material);

/// Deformation gradient of element `e` at the given node positions.
Mat3 deformation_gradient(const FemModel& model, std::size_t e, const std::vector<Vec3>& x);

}  // namespace graspsim::fem
