#include "graspsim/mesh/mass_properties.hpp"

namespace graspsim::mesh {

MassProperties mass_properties(const TetMesh& mesh, double density) {
  if (!(density > 0.0)) throw MeshError("density must be positive");
  MassProperties props;
  props.node_masses.assign(mesh.num_nodes(), 0.0);
  Vec3 moment = Vec3::Zero();
  for (std::size_t e = 0; e < mesh.num_tets(); ++e) {
    const Tet& t = mesh.tets()[e];
    const double m = density * mesh.tet_volume(e);
    Vec3 centroid = Vec3::Zero();
    for (int v : t) {
      props.node_masses[v] += 0.25 * m;
      centroid += 0.25 * mesh.nodes()[v];
    }
    props.mass += m;
    moment += m * centroid;
  }
  props.com = moment / props.mass;
  return props;
}

Vec3 center_of_mass(const std::vector<Vec3>& positions, const std::vector<double>& node_masses) {
  Vec3 moment = Vec3::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    moment += node_masses[i] * positions[i];
    total += node_masses[i];
  }
  return moment / total;
}

}  // namespace graspsim::mesh
