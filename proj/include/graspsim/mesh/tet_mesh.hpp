#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace graspsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

}  // namespace graspsim

namespace graspsim::mesh {

using Tet = std::array<int, 4>;
using Tri = std::array<int, 3>;

/// Raised when a mesh file or generated mesh violates a structural invariant.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for a tetrahedron whose |volume| is below the rejection threshold.
class DegenerateElementError : public MeshError {
 public:
  DegenerateElementError(std::size_t element, double volume);
  std::size_t element() const { return element_; }
  double volume() const { return volume_; }

 private:
  std::size_t element_;
  double volume_;
};

/// Volumes below this (m^3) are rejected as degenerate.
inline constexpr double kMinTetVolume = 1e-12;

double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Immutable tetrahedral mesh. Construction reorders inverted tets so every
/// stored element has positive signed volume, then extracts the outward
/// oriented boundary triangles (faces referenced by exactly one tet).
class TetMesh {
 public:
  TetMesh() = default;
  TetMesh(std::vector<Vec3> nodes, std::vector<Tet> tets);

  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<Tet>& tets() const { return tets_; }
  const std::vector<Tri>& surface_tris() const { return surface_tris_; }
  /// Sorted indices of nodes that appear in at least one surface triangle.
  const std::vector<int>& surface_nodes() const { return surface_nodes_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_tets() const { return tets_.size(); }

  double tet_volume(std::size_t e) const;
  double total_volume() const;
  /// Number of tets flipped to positive orientation during construction.
  std::size_t reordered_tets() const { return reordered_; }

  /// Copy with every node mapped through x -> rotation * x + translation.
  TetMesh transformed(const Mat3& rotation, const Vec3& translation) const;

  /// Axis-aligned bounds of the node set.
  Vec3 min_corner() const;
  Vec3 max_corner() const;

 private:
  void extract_surface();

  std::vector<Vec3> nodes_;
  std::vector<Tet> tets_;
  std::vector<Tri> surface_tris_;
  std::vector<int> surface_nodes_;
  std::size_t reordered_ = 0;
};

/// V - E + F of the surface triangulation.
int surface_euler_characteristic(const TetMesh& mesh);

/// Outward unit normal and area of a surface triangle.
Vec3 triangle_normal(const TetMesh& mesh, const Tri& tri);
double triangle_area(const TetMesh& mesh, const Tri& tri);

}  // namespace graspsim::mesh
