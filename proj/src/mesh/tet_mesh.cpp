#include "graspsim/mesh/tet_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <Eigen/Geometry>

namespace graspsim::mesh {

namespace {

std::string degenerate_message(std::size_t element, double volume) {
  std::ostringstream os;
  os << "degenerate tetrahedron " << element << " (volume " << volume << " m^3)";
  return os.str();
}

}  // namespace

DegenerateElementError::DegenerateElementError(std::size_t element, double volume)
    : MeshError(degenerate_message(element, volume)), element_(element), volume_(volume) {}

double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

TetMesh::TetMesh(std::vector<Vec3> nodes, std::vector<Tet> tets)
    : nodes_(std::move(nodes)), tets_(std::move(tets)) {
  if (tets_.empty()) throw MeshError("mesh has no tetrahedra");
  const int n = static_cast<int>(nodes_.size());
  for (std::size_t e = 0; e < tets_.size(); ++e) {
    Tet& t = tets_[e];
    for (int v : t) {
      if (v < 0 || v >= n) {
        throw MeshError("tet " + std::to_string(e) + " references node " + std::to_string(v) +
                        " out of range [0, " + std::to_string(n) + ")");
      }
    }
    const double vol = signed_tet_volume(nodes_[t[0]], nodes_[t[1]], nodes_[t[2]], nodes_[t[3]]);
    if (!(std::abs(vol) >= kMinTetVolume)) throw DegenerateElementError(e, vol);
    if (vol < 0.0) {
      std::swap(t[2], t[3]);
      ++reordered_;
    }
  }
  extract_surface();
}

void TetMesh::extract_surface() {
  // Outward faces of a positively oriented tet (a, b, c, d).
  static constexpr int kFaces[4][3] = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};

  std::map<std::array<int, 3>, std::pair<int, Tri>> faces;
  for (const Tet& t : tets_) {
    for (const auto& f : kFaces) {
      Tri tri{t[f[0]], t[f[1]], t[f[2]]};
      std::array<int, 3> key{tri[0], tri[1], tri[2]};
      std::sort(key.begin(), key.end());
      auto [it, inserted] = faces.try_emplace(key, 0, tri);
      ++it->second.first;
    }
  }

  surface_tris_.clear();
  std::set<int> on_surface;
  for (const auto& [key, entry] : faces) {
    if (entry.first > 2) throw MeshError("non-manifold face shared by more than two tets");
    if (entry.first == 1) {
      surface_tris_.push_back(entry.second);
      on_surface.insert(key.begin(), key.end());
    }
  }
  surface_nodes_.assign(on_surface.begin(), on_surface.end());
}

double TetMesh::tet_volume(std::size_t e) const {
  const Tet& t = tets_.at(e);
  return signed_tet_volume(nodes_[t[0]], nodes_[t[1]], nodes_[t[2]], nodes_[t[3]]);
}

double TetMesh::total_volume() const {
  double v = 0.0;
  for (std::size_t e = 0; e < tets_.size(); ++e) v += tet_volume(e);
  return v;
}

TetMesh TetMesh::transformed(const Mat3& rotation, const Vec3& translation) const {
  std::vector<Vec3> moved;
  moved.reserve(nodes_.size());
  for (const Vec3& p : nodes_) moved.push_back(rotation * p + translation);
  return TetMesh(std::move(moved), tets_);
}

Vec3 TetMesh::min_corner() const {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  for (const Vec3& p : nodes_) lo = lo.cwiseMin(p);
  return lo;
}

Vec3 TetMesh::max_corner() const {
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
  for (const Vec3& p : nodes_) hi = hi.cwiseMax(p);
  return hi;
}

int surface_euler_characteristic(const TetMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const Tri& t : mesh.surface_tris()) {
    for (int i = 0; i < 3; ++i) {
      int a = t[i], b = t[(i + 1) % 3];
      edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  return static_cast<int>(mesh.surface_nodes().size()) - static_cast<int>(edges.size()) +
         static_cast<int>(mesh.surface_tris().size());
}

Vec3 triangle_normal(const TetMesh& mesh, const Tri& tri) {
  const auto& x = mesh.nodes();
  return (x[tri[1]] - x[tri[0]]).cross(x[tri[2]] - x[tri[0]]).normalized();
}

double triangle_area(const TetMesh& mesh, const Tri& tri) {
  const auto& x = mesh.nodes();
  return 0.5 * (x[tri[1]] - x[tri[0]]).cross(x[tri[2]] - x[tri[0]]).norm();
}

}  // namespace graspsim::mesh
