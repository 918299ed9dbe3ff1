#include "graspsim/fem/model.hpp"

#include <cmath>
#include <Eigen/LU>

namespace graspsim::fem {

DegenerateElementError::DegenerateElementError(std::size_t element)
    : std::runtime_error("near-singular rest shape in element " + std::to_string(element)),
      element_(element) {}

FemModel::FemModel(std::shared_ptr<const mesh::TetMesh> mesh, MaterialParams material)
    : mesh_(std::move(mesh)), material_(material) {
  material_.validate();
  const auto& nodes = mesh_->nodes();
  const std::size_t ne = mesh_->num_tets();
  rest_inverses_.resize(ne);
  element_stiffness_.resize(ne);
  volumes_.resize(ne);
  lumped_masses_.assign(mesh_->num_nodes(), 0.0);

  const double lambda = material_.lame_lambda();
  const double mu = material_.lame_mu();

  for (std::size_t e = 0; e < ne; ++e) {
    const mesh::Tet& t = mesh_->tets()[e];
    Mat3 dm;
    dm.col(0) = nodes[t[1]] - nodes[t[0]];
    dm.col(1) = nodes[t[2]] - nodes[t[0]];
    dm.col(2) = nodes[t[3]] - nodes[t[0]];
    const double det = dm.determinant();
    const double scale = dm.colwise().norm().prod();
    if (!(det > 1e-12 * scale)) throw DegenerateElementError(e);
    rest_inverses_[e] = dm.inverse();
    volumes_[e] = det / 6.0;

    // Shape function gradients: rows of Dm^-1 for nodes 1..3, node 0 balances.
    std::array<Vec3, 4> grad;
    for (int a = 1; a < 4; ++a) grad[a] = rest_inverses_[e].row(a - 1).transpose();
    grad[0] = -(grad[1] + grad[2] + grad[3]);

    Mat12& k = element_stiffness_[e];
    const double v = volumes_[e];
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        k.block<3, 3>(3 * a, 3 * b) =
            v * (lambda * grad[a] * grad[b].transpose() + mu * grad[b] * grad[a].transpose() +
                 mu * grad[a].dot(grad[b]) * Mat3::Identity());
      }
    }

    const double m = material_.density * volumes_[e];
    for (int node : t) lumped_masses_[node] += 0.25 * m;
    total_mass_ += m;
  }
}

FemModel build_model(std::shared_ptr<const mesh::TetMesh> mesh, const MaterialParams& material) {
  return FemModel(std::move(mesh), material);
}

FemModel build_model(const mesh::TetMesh& mesh, const MaterialParams& material) {
  return FemModel(std::make_shared<const mesh::TetMesh>(mesh), material);
}

Mat3 deformation_gradient(const FemModel& model, std::size_t e, const std::vector<Vec3>& x) {
  const mesh::Tet& t = model.mesh().tets()[e];
  Mat3 ds;
  ds.col(0) = x[t[1]] - x[t[0]];
  ds.col(1) = x[t[2]] - x[t[0]];
  ds.col(2) = x[t[3]] - x[t[0]];
  return ds * model.rest_inverse(e);
}

}  // namespace graspsim::fem
