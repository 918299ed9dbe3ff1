#include "graspsim/fem/vtk_writer.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace graspsim::fem {

void write_vtk(const std::filesystem::path& path, const mesh::TetMesh& mesh,
               const std::vector<Vec3>& positions, const std::vector<Vec3>& displacement,
               const std::vector<double>& von_mises, const std::string& title) {
  const std::size_t nn = mesh.num_nodes(), ne = mesh.num_tets();
  if (positions.size() != nn || displacement.size() != nn || von_mises.size() != ne) {
    throw std::invalid_argument("snapshot field sizes do not match the mesh");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");

  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << std::setprecision(17);
  out << "POINTS " << nn << " double\n";
  for (const Vec3& p : positions) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';

  out << "CELLS " << ne << ' ' << 5 * ne << '\n';
  for (const mesh::Tet& t : mesh.tets()) {
    out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (std::size_t e = 0; e < ne; ++e) out << "10\n";

  out << "POINT_DATA " << nn << "\nVECTORS displacement double\n";
  for (const Vec3& d : displacement) out << d.x() << ' ' << d.y() << ' ' << d.z() << '\n';

  out << "CELL_DATA " << ne << "\nSCALARS von_mises double 1\nLOOKUP_TABLE default\n";
  for (double s : von_mises) out << s << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace graspsim::fem
