#pragma once

#include <vector>

#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::mesh {

struct MassProperties {
  double mass = 0.0;                 // kg
  Vec3 com = Vec3::Zero();           // m
  std::vector<double> node_masses;   // kg, each tet's mass split equally over its nodes
};

MassProperties mass_properties(const TetMesh& mesh, double density);

/// Center of mass of arbitrary node positions weighted by lumped masses.
Vec3 center_of_mass(const std::vector<Vec3>& positions, const std::vector<double>& node_masses);

}  // namespace graspsim::mesh
