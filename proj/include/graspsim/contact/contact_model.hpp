#pragma once

#include <array>
#include <optional>
#include <vector>

#include "graspsim/contact/gripper.hpp"
#include "graspsim/fem/integrator.hpp"

namespace graspsim::contact {

struct ContactParams {
  double stiffness = 1e5;             // normal penalty, N/m
  double tangential_stiffness = 1e5;  // stick spring, N/m
  double friction = 0.7;
  /// Lower bound on the tangential offset at which friction saturates, m.
  double min_slip_radius = 1e-5;
};

struct Contact {
  int node = 0;
  Body body = Body::left;
  Vec3 point = Vec3::Zero();   // closest point on the body surface
  Vec3 normal = Vec3::UnitZ(); // from the body toward the object
  double normal_force = 0.0;   // N, >= 0
  Eigen::Vector2d tangential = Eigen::Vector2d::Zero();  // in tangent_basis(normal)
  Vec3 tangential_force = Vec3::Zero();
  bool sliding = false;

  /// Total force the body applies to the object node.
  Vec3 force() const { return normal_force * normal + tangential_force; }
};

struct ContactSet {
  std::vector<Contact> contacts;

  int count(Body body) const;
  double normal_force(Body body) const;
  /// Net force the body applies to the object.
  Vec3 force_on_object(Body body) const;
  /// Largest ||f_t|| - mu f_n over all contacts (<= 0 when inside the cone).
  double max_cone_excess(double friction) const;
  bool satisfies_coulomb(double friction, double tolerance = 1e-9) const;
};

/// Orthonormal tangent pair for a unit normal, deterministic in the normal.
std::array<Vec3, 2> tangent_basis(const Vec3& normal);

/// Friction anchor of one (node, body) pair: the stick point in the body's
/// local frame, so it travels with the body, and the normal force when it was
/// last committed.
struct Anchor {
  Vec3 local = Vec3::Zero();
  double normal_force = 0.0;
};

class FrictionAnchors {
 public:
  explicit FrictionAnchors(std::size_t num_nodes = 0) : slots_(num_nodes) {}

  const std::optional<Anchor>& get(int node, Body body) const { return slots_[node][static_cast<int>(body)]; }
  void set(int node, Body body, const Anchor& anchor) { slots_[node][static_cast<int>(body)] = anchor; }
  void erase(int node, Body body) { slots_[node][static_cast<int>(body)].reset(); }
  void clear();
  std::size_t size() const;

 private:
  std::vector<std::array<std::optional<Anchor>, 3>> slots_;
};

/// Rigid frame (rotation, origin) of a contact body.
struct BodyFrame {
  Mat3 rotation = Mat3::Identity();
  Vec3 origin = Vec3::Zero();
  Vec3 to_world(const Vec3& local) const { return rotation * local + origin; }
  Vec3 to_local(const Vec3& world) const { return rotation.transpose() * (world - origin); }
};

BodyFrame body_frame(Body body, const GripperState& gripper, std::optional<double> platform_height);

/// Penalty normal force k * max(0, -d) for every penetrating node in `nodes`,
/// plus friction from a stick spring that saturates smoothly on the Coulomb
/// cone: with u the tangential offset from the anchor and
/// s = k_t |u| / (2 mu N_a), where N_a is the anchor's committed normal force,
/// f_t = -mu f_n (2s - s^2) u/|u| for s < 1 and -mu f_n u/|u| beyond. The
/// initial slope is k_t and |f_t| <= mu f_n always holds. Without anchors the
/// friction is zero. `forces` (per node) and `stiffness` (per-node 3x3 blocks
/// of -df/dx) are accumulated when non-null. The friction-normal coupling is
/// the only nonsymmetric part; it goes to `rank_one` when that is non-null. Gripper pads never touch the
/// platform, which is the half-space z <= platform_height.
ContactSet evaluate_contacts(const std::vector<Vec3>& positions, const std::vector<int>& nodes,
                             const GripperState& gripper, std::optional<double> platform_height,
                             const ContactParams& params, const FrictionAnchors* anchors,
                             std::vector<Vec3>* forces, std::vector<Mat3>* stiffness,
                             std::vector<fem::RankOneBlock>* rank_one = nullptr);

/// Convenience form over the mesh surface nodes; returns per-node forces.
std::pair<std::vector<Vec3>, ContactSet> contact_forces(const fem::SimState& state, const mesh::TetMesh& mesh,
                                                         const GripperState& gripper,
                                                         std::optional<double> platform_height, double friction,
                                                         double stiffness, const FrictionAnchors* anchors = nullptr);

/// Records anchors for the contacts in `set`: new contacts anchor where they
/// are, saturated ones are pulled to the cone boundary (s = 1), and pairs no
/// longer in contact are dropped.
void commit_anchors(const ContactSet& set, const std::vector<Vec3>& positions, const GripperState& gripper,
                    std::optional<double> platform_height, const ContactParams& params, FrictionAnchors& anchors);

/// Contact as an implicit force field for the integrator, with frozen anchors.
class ContactField : public fem::ForceField {
 public:
  ContactField(const std::vector<int>& nodes, const GripperState& gripper, std::optional<double> platform_height,
               const ContactParams& params, const FrictionAnchors& anchors)
      : nodes_(nodes), gripper_(gripper), platform_(platform_height), params_(params), anchors_(anchors) {}

  void add_forces(const std::vector<Vec3>& x, std::vector<Vec3>& forces, std::vector<Mat3>* stiffness,
                  std::vector<fem::RankOneBlock>* rank_one) const override;

 private:
  const std::vector<int>& nodes_;
  const GripperState& gripper_;
  std::optional<double> platform_;
  const ContactParams& params_;
  const FrictionAnchors& anchors_;
};

}  // namespace graspsim::contact
