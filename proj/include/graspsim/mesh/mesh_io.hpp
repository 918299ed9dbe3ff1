#pragma once

#include <filesystem>

#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::mesh {

enum class MeshFormat { node_ele, msh };

/// Parses `format` from "node-ele" or "msh"; throws MeshError otherwise.
MeshFormat parse_mesh_format(const std::string& name);

/// Loads a tetrahedral mesh.
///
/// node-ele: `path` is either the `.node` file, the `.ele` file or their
/// common stem. Both files start with a header line `<count> <arity>` and
/// list one 0-based record per line (`id x y z` / `id n0 n1 n2 n3`); `#`
/// starts a comment. See docs/file_formats.md.
///
/// msh: ASCII gmsh v2; only nodes and 4-node tetrahedra (type 4) are read,
/// other element types are skipped.
TetMesh load_mesh(const std::filesystem::path& path, MeshFormat format);

/// Writes `<stem>.node` and `<stem>.ele`.
void save_node_ele(const TetMesh& mesh, const std::filesystem::path& stem);

}  // namespace graspsim::mesh
