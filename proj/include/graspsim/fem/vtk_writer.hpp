#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::fem {

/// Legacy ASCII VTK unstructured grid of tetrahedra (cell type 10) with a
/// point vector field "displacement" and a cell scalar field "von_mises".
/// Points are written at `positions`.
void write_vtk(const std::filesystem::path& path, const mesh::TetMesh& mesh,
               const std::vector<Vec3>& positions, const std::vector<Vec3>& displacement,
               const std::vector<double>& von_mises, const std::string& title = "graspsim snapshot");

}  // namespace graspsim::fem
