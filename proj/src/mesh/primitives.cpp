#include "graspsim/mesh/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace graspsim::mesh {

namespace {

using Vec2 = Eigen::Vector2d;

// Planar triangulation; each triangle carries a region tag so that layers can
// include or omit parts of the section (cup base, flask shoulder, ...).
struct Section {
  std::vector<Vec2> points;
  std::vector<Tri> tris;
  std::vector<int> region;

  void add_quad(int a, int b, int c, int d, int tag) {
    tris.push_back({a, b, c});
    tris.push_back({a, c, d});
    region.push_back(tag);
    region.push_back(tag);
  }
};

// Sweeps a section through `levels` layers. Each triangle of a band becomes a
// wedge split into three tets; the split picks every quad diagonal from the
// bottom of the higher-indexed planar vertex to the top of the lower one, so
// wedges sharing a side face always agree and the result is conforming.
TetMesh extrude(const Section& section, int levels,
                const std::function<bool(int region, int band)>& include,
                const std::function<Vec3(int point, int level)>& place) {
  const int np = static_cast<int>(section.points.size());
  std::vector<Tet> tets;
  for (int band = 0; band + 1 < levels; ++band) {
    for (std::size_t t = 0; t < section.tris.size(); ++t) {
      if (!include(section.region[t], band)) continue;
      Tri v = section.tris[t];
      std::sort(v.begin(), v.end());
      const int lo = band * np, hi = (band + 1) * np;
      tets.push_back({v[0] + lo, v[1] + lo, v[2] + lo, v[0] + hi});
      tets.push_back({v[1] + lo, v[2] + lo, v[0] + hi, v[1] + hi});
      tets.push_back({v[2] + lo, v[0] + hi, v[1] + hi, v[2] + hi});
    }
  }

  std::vector<int> remap(static_cast<std::size_t>(np) * levels, -1);
  std::vector<Vec3> nodes;
  for (Tet& t : tets) {
    for (int& id : t) {
      if (remap[id] < 0) {
        remap[id] = static_cast<int>(nodes.size());
        nodes.push_back(place(id % np, id / np));
      }
      id = remap[id];
    }
  }
  return TetMesh(std::move(nodes), std::move(tets));
}

TetMesh rest_on_ground(const TetMesh& mesh) {
  const Vec3 lo = mesh.min_corner(), hi = mesh.max_corner();
  const Vec3 shift(-0.5 * (lo.x() + hi.x()), -0.5 * (lo.y() + hi.y()), -lo.z());
  return mesh.transformed(Mat3::Identity(), shift);
}

Vec2 squircle_to_disk(double u, double v) {
  return {u * std::sqrt(1.0 - 0.5 * v * v), v * std::sqrt(1.0 - 0.5 * u * u)};
}

// Regular n x n grid on [-1, 1]^2; point (i, j) has index i + j * (n + 1).
Section square_grid(int nx, int ny, double sx, double sy) {
  Section s;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      s.points.emplace_back(sx * (-1.0 + 2.0 * i / nx), sy * (-1.0 + 2.0 * j / ny));
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = i + j * (nx + 1);
      s.add_quad(a, a + 1, a + nx + 2, a + nx + 1, 0);
    }
  }
  return s;
}

struct Ellipse {
  double a;
  double b;
};

// Elliptic disk: a squircle-mapped core (region 0, ellipse `core`) plus
// concentric rings; ring band k (region k, 1-based) lies between rings[k-1]
// (or the core boundary) and rings[k].
Section elliptic_section(int n, Ellipse core, const std::vector<Ellipse>& rings) {
  Section s = square_grid(n, n, 1.0, 1.0);
  for (Vec2& p : s.points) {
    const Vec2 q = squircle_to_disk(p.x(), p.y());
    p = Vec2(core.a * q.x(), core.b * q.y());
  }

  std::vector<int> loop;
  for (int i = 0; i < n; ++i) loop.push_back(i);
  for (int j = 0; j < n; ++j) loop.push_back(n + j * (n + 1));
  for (int i = n; i > 0; --i) loop.push_back(i + n * (n + 1));
  for (int j = n; j > 0; --j) loop.push_back(j * (n + 1));

  std::vector<Vec2> unit_dirs;
  for (int id : loop) unit_dirs.emplace_back(s.points[id].x() / core.a, s.points[id].y() / core.b);

  const int m = static_cast<int>(loop.size());
  std::vector<int> inner = loop;
  for (std::size_t k = 0; k < rings.size(); ++k) {
    std::vector<int> outer(m);
    for (int q = 0; q < m; ++q) {
      outer[q] = static_cast<int>(s.points.size());
      s.points.emplace_back(rings[k].a * unit_dirs[q].x(), rings[k].b * unit_dirs[q].y());
    }
    for (int q = 0; q < m; ++q) {
      const int r = (q + 1) % m;
      s.add_quad(inner[q], inner[r], outer[r], outer[q], static_cast<int>(k) + 1);
    }
    inner = std::move(outer);
  }
  return s;
}

std::vector<double> linspace(double a, double b, int cells) {
  std::vector<double> v(cells + 1);
  for (int i = 0; i <= cells; ++i) v[i] = a + (b - a) * i / cells;
  return v;
}

void append_levels(std::vector<double>& z, double top, int cells) {
  const double bottom = z.back();
  for (int i = 1; i <= cells; ++i) z.push_back(bottom + (top - bottom) * i / cells);
}

int cells_for(double length, double spacing) {
  return std::max(1, static_cast<int>(std::lround(length / spacing)));
}

void require_dims(const PrimitiveSpec& spec, std::size_t count) {
  if (spec.dims.size() != count) {
    throw MeshError(to_string(spec.kind) + " expects " + std::to_string(count) + " dimensions, got " +
                    std::to_string(spec.dims.size()));
  }
  for (double d : spec.dims) {
    if (!(d > 0.0)) throw MeshError(to_string(spec.kind) + " dimensions must be positive");
  }
}

TetMesh make_prism(const PrimitiveSpec& spec, int res) {
  require_dims(spec, 3);
  const Vec3 ext(spec.dims[0], spec.dims[1], spec.dims[2]);
  const double h = ext.minCoeff() / res;
  const int nx = static_cast<int>(std::ceil(ext.x() / h - 1e-9));
  const int ny = static_cast<int>(std::ceil(ext.y() / h - 1e-9));
  const int nz = static_cast<int>(std::ceil(ext.z() / h - 1e-9));
  const Section s = square_grid(nx, ny, 0.5 * ext.x(), 0.5 * ext.y());
  const auto z = linspace(0.0, ext.z(), nz);
  return extrude(
      s, nz + 1, [](int, int) { return true; },
      [&](int p, int l) { return Vec3(s.points[p].x(), s.points[p].y(), z[l]); });
}

TetMesh make_spheroid(const PrimitiveSpec& spec, int res) {
  require_dims(spec, 2);
  const double a = spec.dims[0], c = spec.dims[1];
  const int n = 2 * res;
  const Section s = square_grid(n, n, 1.0, 1.0);
  const auto w = linspace(-1.0, 1.0, n);
  // Cube-to-ball map, then scaled so the polar axis lies along x.
  auto place = [&](int p, int l) {
    const double u = s.points[p].x(), v = s.points[p].y(), t = w[l];
    const double x = u * std::sqrt(1.0 - v * v / 2 - t * t / 2 + v * v * t * t / 3);
    const double y = v * std::sqrt(1.0 - t * t / 2 - u * u / 2 + t * t * u * u / 3);
    const double z = t * std::sqrt(1.0 - u * u / 2 - v * v / 2 + u * u * v * v / 3);
    return Vec3(c * x, a * y, a * z);
  };
  return rest_on_ground(extrude(s, n + 1, [](int, int) { return true; }, place));
}

TetMesh make_cylinder(const PrimitiveSpec& spec, int res) {
  require_dims(spec, 2);
  const double radius = spec.dims[0], length = spec.dims[1];
  const int n = 2 * res;
  const Section s = elliptic_section(n, {radius, radius}, {});
  const double spacing = 2.0 * std::numbers::pi * radius / (4 * n);
  const int cells = cells_for(length, spacing);
  const auto x = linspace(-0.5 * length, 0.5 * length, cells);
  return rest_on_ground(extrude(
      s, cells + 1, [](int, int) { return true; },
      [&](int p, int l) { return Vec3(x[l], s.points[p].x(), s.points[p].y()); }));
}

void check_wall(const PrimitiveSpec& spec, double wall, double smaller_radius) {
  if (wall >= 0.5 * smaller_radius) {
    throw MeshError(to_string(spec.kind) + " wall thickness " + std::to_string(wall) +
                    " must be below half the smaller radius " + std::to_string(smaller_radius));
  }
}

TetMesh make_cup_or_ring(const PrimitiveSpec& spec, int res, bool with_base) {
  require_dims(spec, 3);
  const double radius = spec.dims[0], height = spec.dims[1], wall = spec.dims[2];
  check_wall(spec, wall, radius);
  if (with_base && height <= wall) throw MeshError("cup height must exceed the base thickness");

  const int n = 2 * res;
  const int wall_cells = std::max(1, res / 2);
  const double inner = radius - wall;
  std::vector<Ellipse> rings;
  for (int k = 1; k <= wall_cells; ++k) {
    const double r = inner + wall * k / wall_cells;
    rings.push_back({r, r});
  }
  const Section s = elliptic_section(n, {inner, inner}, rings);

  const double spacing = 2.0 * std::numbers::pi * radius / (4 * n);
  std::vector<double> z{0.0};
  int base_bands = 0;
  if (with_base) {
    base_bands = std::max(1, res / 2);
    append_levels(z, wall, base_bands);
  }
  append_levels(z, height, cells_for(height - z.back(), spacing));

  auto include = [&](int region, int band) { return region > 0 || band < base_bands; };
  return extrude(s, static_cast<int>(z.size()), include, [&](int p, int l) {
    return Vec3(s.points[p].x(), s.points[p].y(), z[l]);
  });
}

TetMesh make_flask(const PrimitiveSpec& spec, int res) {
  require_dims(spec, 4);
  const double sa = spec.dims[0], sb = spec.dims[1], height = spec.dims[2], wall = spec.dims[3];
  check_wall(spec, wall, std::min(sa, sb));
  if (height <= 2.0 * wall) throw MeshError("flask height must exceed twice the wall thickness");

  const int n = 2 * res;
  const double neck = 0.5 * (std::min(sa, sb) - wall);
  const int shoulder_cells = std::max(1, res);
  const int wall_cells = std::max(1, res / 2);
  std::vector<Ellipse> rings;
  for (int k = 1; k <= shoulder_cells; ++k) {
    const double f = static_cast<double>(k) / shoulder_cells;
    rings.push_back({neck + (sa - wall - neck) * f, neck + (sb - wall - neck) * f});
  }
  for (int k = 1; k <= wall_cells; ++k) {
    const double f = static_cast<double>(k) / wall_cells;
    rings.push_back({sa - wall + wall * f, sb - wall + wall * f});
  }
  const Section s = elliptic_section(n, {neck, neck}, rings);

  const double spacing = 2.0 * std::numbers::pi * std::max(sa, sb) / (4 * n);
  const int cap_bands = std::max(1, res / 2);
  std::vector<double> z{0.0};
  append_levels(z, wall, cap_bands);
  const int body_bands = cells_for(height - 2.0 * wall, spacing);
  append_levels(z, height - wall, body_bands);
  append_levels(z, height, cap_bands);

  auto include = [&](int region, int band) {
    if (band < cap_bands) return true;                     // base
    if (band < cap_bands + body_bands) return region > shoulder_cells;  // side wall
    return region > 0;                                     // top with neck opening
  };
  return extrude(s, static_cast<int>(z.size()), include, [&](int p, int l) {
    return Vec3(s.points[p].x(), s.points[p].y(), z[l]);
  });
}

}  // namespace

PrimitiveKind parse_primitive_kind(const std::string& name) {
  if (name == "prism") return PrimitiveKind::prism;
  if (name == "spheroid") return PrimitiveKind::spheroid;
  if (name == "cylinder") return PrimitiveKind::cylinder;
  if (name == "cup") return PrimitiveKind::cup;
  if (name == "ring") return PrimitiveKind::ring;
  if (name == "flask") return PrimitiveKind::flask;
  throw MeshError("unknown primitive kind '" + name + "'");
}

std::string to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::prism: return "prism";
    case PrimitiveKind::spheroid: return "spheroid";
    case PrimitiveKind::cylinder: return "cylinder";
    case PrimitiveKind::cup: return "cup";
    case PrimitiveKind::ring: return "ring";
    case PrimitiveKind::flask: return "flask";
  }
  return "unknown";
}

TetMesh make_primitive(const PrimitiveSpec& spec, int resolution) {
  if (resolution < 1) throw MeshError("resolution must be >= 1");
  switch (spec.kind) {
    case PrimitiveKind::prism: return make_prism(spec, resolution);
    case PrimitiveKind::spheroid: return make_spheroid(spec, resolution);
    case PrimitiveKind::cylinder: return make_cylinder(spec, resolution);
    case PrimitiveKind::cup: return make_cup_or_ring(spec, resolution, true);
    case PrimitiveKind::ring: return make_cup_or_ring(spec, resolution, false);
    case PrimitiveKind::flask: return make_flask(spec, resolution);
  }
  throw MeshError("unknown primitive kind");
}

}  // namespace graspsim::mesh
