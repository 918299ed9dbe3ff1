#pragma once

#include <string>
#include <vector>

#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::mesh {

enum class PrimitiveKind { prism, spheroid, cylinder, cup, ring, flask };

PrimitiveKind parse_primitive_kind(const std::string& name);
std::string to_string(PrimitiveKind kind);

/// Primitive shape parameters in meters. `dims` is kind specific:
///   prism    [lx, ly, lz]                full extents
///   spheroid [a, c]                      equatorial / polar semi-axes, polar axis along x
///   cylinder [radius, length]            axis along x
///   cup      [radius, height, wall]      axis along z, open top, base thickness = wall
///   ring     [radius, height, wall]      cup without the base
///   flask    [semi_x, semi_y, height, wall]  elliptic hollow body with a circular neck opening
/// Every generated mesh rests on z = 0 and is centered on the z axis.
struct PrimitiveSpec {
  PrimitiveKind kind = PrimitiveKind::prism;
  std::vector<double> dims;
};

/// Builds a conforming tet mesh of the primitive. `resolution` >= 1 scales
/// the number of cells per characteristic length (roughly linearly).
TetMesh make_primitive(const PrimitiveSpec& spec, int resolution);

}  // namespace graspsim::mesh
