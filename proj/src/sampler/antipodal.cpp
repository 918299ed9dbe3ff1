#include "graspsim/sampler/antipodal.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace graspsim::sampler {

void GraspPose::validate() const {
  if (std::abs(approach.norm() - 1.0) > 1e-9 || std::abs(roll.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("grasp " + std::to_string(id) + ": axes must be unit length");
  }
  if (std::abs(approach.dot(roll)) > 1e-9) {
    throw std::invalid_argument("grasp " + std::to_string(id) + ": approach and roll must be orthogonal");
  }
  if (!(separation > 0.0)) throw std::invalid_argument("grasp " + std::to_string(id) + ": separation must be positive");
}

SamplerExhausted::SamplerExhausted(int found, int requested, int trials)
    : std::runtime_error("antipodal sampler found " + std::to_string(found) + " of " + std::to_string(requested) +
                         " grasps in " + std::to_string(trials) + " trials"),
      found_(found) {}

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                                         const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = inv * s.dot(p);
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = inv * dir.dot(q);
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = inv * e2.dot(q);
  if (!(t > 0.0)) return std::nullopt;
  return t;
}

std::optional<RayHit> cast_ray(const mesh::TetMesh& mesh, const Vec3& origin, const Vec3& dir, int skip,
                               double min_t) {
  std::optional<RayHit> best;
  const auto& tris = mesh.surface_tris();
  const auto& x = mesh.nodes();
  for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
    if (i == skip) continue;
    const mesh::Tri& t = tris[i];
    const auto hit = intersect_triangle(origin, dir, x[t[0]], x[t[1]], x[t[2]]);
    if (!hit || *hit <= min_t || (best && *hit >= best->t)) continue;
    best = RayHit{*hit, i, origin + *hit * dir, mesh::triangle_normal(mesh, t)};
  }
  return best;
}

namespace {

// Unit vector orthogonal to `axis`, deterministic in the axis.
Vec3 any_orthogonal(const Vec3& axis) {
  int k = 0;
  axis.cwiseAbs().minCoeff(&k);
  return axis.cross(Vec3::Unit(k)).normalized();
}

}  // namespace

std::vector<GraspPose> sample_antipodal(const mesh::TetMesh& mesh, const SamplerOptions& options) {
  if (options.count < 1) throw std::invalid_argument("grasp count must be at least 1");
  if (!(options.max_width > 0.0) || options.max_width > options.max_opening) {
    throw std::invalid_argument("max_width must be positive and at most the gripper opening");
  }
  const auto& tris = mesh.surface_tris();
  if (tris.empty()) throw std::invalid_argument("mesh has no surface");

  std::vector<double> cumulative(tris.size());
  double total = 0.0;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    total += mesh::triangle_area(mesh, tris[i]);
    cumulative[i] = total;
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cos_cone = std::cos(options.cone_half_angle);
  const auto& x = mesh.nodes();

  std::vector<GraspPose> grasps;
  int trials = 0;
  while (static_cast<int>(grasps.size()) < options.count) {
    if (trials >= options.max_trials) throw SamplerExhausted(static_cast<int>(grasps.size()), options.count, trials);
    ++trials;
    const double pick = unit(rng) * total;
    const int tri = static_cast<int>(std::min<std::ptrdiff_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin(),
        static_cast<std::ptrdiff_t>(tris.size()) - 1));
    const double r1 = std::sqrt(unit(rng)), r2 = unit(rng);
    const double roll_angle = 2.0 * std::numbers::pi * unit(rng);

    const mesh::Tri& t = tris[tri];
    const Vec3 p1 = (1.0 - r1) * x[t[0]] + r1 * (1.0 - r2) * x[t[1]] + r1 * r2 * x[t[2]];
    const Vec3 n1 = mesh::triangle_normal(mesh, t);
    const auto hit = cast_ray(mesh, p1, -n1, tri);
    if (!hit) continue;
    const double width = hit->t;
    if (width > options.max_width || hit->normal.dot(-n1) < cos_cone) continue;

    GraspPose g;
    g.id = static_cast<int>(grasps.size());
    g.approach = (hit->point - p1).normalized();
    g.center = 0.5 * (p1 + hit->point);
    const Vec3 e1 = any_orthogonal(g.approach);
    const Vec3 e2 = g.approach.cross(e1);
    g.roll = std::cos(roll_angle) * e1 + std::sin(roll_angle) * e2;
    g.width = width;
    g.separation = std::min(width + 2.0 * options.approach_margin, options.max_opening);
    grasps.push_back(g);
  }
  return grasps;
}

void write_grasps_csv(std::ostream& out, const std::vector<GraspPose>& grasps) {
  out << "id,cx,cy,cz,ax,ay,az,rx,ry,rz,separation,width\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    out << buf;
  };
  for (const GraspPose& g : grasps) {
    out << g.id;
    for (const Vec3* v : {&g.center, &g.approach, &g.roll})
      for (int k = 0; k < 3; ++k) put((*v)[k]);
    put(g.separation);
    put(g.width);
    out << '\n';
  }
}

std::vector<GraspPose> read_grasps_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("id,", 0) != 0) throw std::runtime_error("grasp CSV: missing header");
  std::vector<GraspPose> grasps;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("grasp CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (v.size() != 11 && v.size() != 12) {
      throw std::runtime_error("grasp CSV line " + std::to_string(line_no) + ": expected 12 columns");
    }
    GraspPose g;
    g.id = static_cast<int>(v[0]);
    g.center = {v[1], v[2], v[3]};
    g.approach = {v[4], v[5], v[6]};
    g.roll = {v[7], v[8], v[9]};
    g.separation = v[10];
    g.width = v.size() > 11 ? v[11] : 0.0;
    g.validate();
    grasps.push_back(g);
  }
  return grasps;
}

void save_grasps(const std::string& path, const std::vector<GraspPose>& grasps) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_grasps_csv(out, grasps);
}

std::vector<GraspPose> load_grasps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_grasps_csv(in);
}

}  // namespace graspsim::sampler
