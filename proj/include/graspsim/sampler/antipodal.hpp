#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graspsim/mesh/tet_mesh.hpp"

namespace graspsim::sampler {

/// Two-finger grasp. `approach` is the squeeze direction (from the first
/// contact toward the second), `roll` the finger long axis; both unit and
/// mutually orthogonal.
struct GraspPose {
  int id = 0;
  Vec3 center = Vec3::Zero();
  Vec3 approach = Vec3::UnitY();
  Vec3 roll = Vec3::UnitX();
  double separation = 0.0;  // initial finger opening, m
  double width = 0.0;       // distance between the two surface contacts, m

  /// Throws std::invalid_argument unless the axes are unit and orthogonal
  /// within 1e-9 and the separation is positive.
  void validate() const;
};

struct SamplerOptions {
  int count = 50;
  double max_width = 0.08;
  double cone_half_angle = std::atan(0.7);
  std::uint64_t seed = 0;
  int max_trials = 10000;
  /// Gripper limit that max_width must respect.
  double max_opening = 0.08;
  /// Pad clearance on each side when the grasp starts, m.
  double approach_margin = 0.002;
};

class SamplerExhausted : public std::runtime_error {
 public:
  SamplerExhausted(int found, int requested, int trials);
  int found() const { return found_; }

 private:
  int found_;
};

struct RayHit {
  double t = 0.0;
  int triangle = -1;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::Zero();  // outward normal of the hit triangle
};

/// Moller-Trumbore intersection parameter t > 0 of origin + t dir with the
/// triangle (a, b, c), or nullopt.
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                                         const Vec3& c);

/// Nearest surface hit with t > min_t, ignoring triangle `skip`.
std::optional<RayHit> cast_ray(const mesh::TetMesh& mesh, const Vec3& origin, const Vec3& dir, int skip = -1,
                               double min_t = 1e-9);

/// Antipodal sampler: an area-uniform surface point p1 with outward normal
/// n1 is paired with the first surface hit p2 of the ray along -n1; the pair
/// is kept when angle(n2, -n1) <= cone_half_angle and |p2 - p1| <= max_width.
/// Roll is uniform about the approach axis. Deterministic in the seed; throws
/// SamplerExhausted when max_trials run out before `count` grasps.
std::vector<GraspPose> sample_antipodal(const mesh::TetMesh& mesh, const SamplerOptions& options);

/// CSV with header id,cx,cy,cz,ax,ay,az,rx,ry,rz,separation,width (%.17g).
void write_grasps_csv(std::ostream& out, const std::vector<GraspPose>& grasps);
std::vector<GraspPose> read_grasps_csv(std::istream& in);
void save_grasps(const std::string& path, const std::vector<GraspPose>& grasps);
std::vector<GraspPose> load_grasps(const std::string& path);

}  // namespace graspsim::sampler
