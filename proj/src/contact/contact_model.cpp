#include "graspsim/contact/contact_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace graspsim::contact {

int ContactSet::count(Body body) const {
  int n = 0;
  for (const Contact& c : contacts) n += (c.body == body && c.normal_force > 0.0);
  return n;
}

double ContactSet::normal_force(Body body) const {
  double f = 0.0;
  for (const Contact& c : contacts)
    if (c.body == body) f += c.normal_force;
  return f;
}

Vec3 ContactSet::force_on_object(Body body) const {
  Vec3 f = Vec3::Zero();
  for (const Contact& c : contacts)
    if (c.body == body) f += c.force();
  return f;
}

double ContactSet::max_cone_excess(double friction) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Contact& c : contacts) worst = std::max(worst, c.tangential_force.norm() - friction * c.normal_force);
  return worst;
}

bool ContactSet::satisfies_coulomb(double friction, double tolerance) const {
  for (const Contact& c : contacts) {
    if (c.normal_force < 0.0 || c.tangential_force.norm() > friction * c.normal_force + tolerance) return false;
  }
  return true;
}

std::array<Vec3, 2> tangent_basis(const Vec3& n) {
  int axis = 0;
  n.cwiseAbs().minCoeff(&axis);
  const Vec3 t1 = n.cross(Vec3::Unit(axis)).normalized();
  return {t1, n.cross(t1)};
}

void FrictionAnchors::clear() {
  for (auto& slots : slots_)
    for (auto& a : slots) a.reset();
}

std::size_t FrictionAnchors::size() const {
  std::size_t n = 0;
  for (const auto& slots : slots_)
    for (const auto& a : slots) n += a.has_value();
  return n;
}

BodyFrame body_frame(Body body, const GripperState& gripper, std::optional<double> platform_height) {
  if (body == Body::platform) return {Mat3::Identity(), Vec3(0.0, 0.0, platform_height.value_or(0.0))};
  return {gripper.rotation, gripper.face_center(body)};
}

namespace {

// Penetration query against one body; nullopt when separated.
std::optional<SignedDistance> probe(const Vec3& x, Body body, const GripperState& gripper,
                                    std::optional<double> platform_height) {
  if (body == Body::platform) {
    if (!platform_height || x.z() >= *platform_height) return std::nullopt;
    return SignedDistance{x.z() - *platform_height, Vec3::UnitZ(), Vec3(x.x(), x.y(), *platform_height)};
  }
  SignedDistance d = finger_signed_distance(x, gripper, body);
  if (d.distance >= 0.0) return std::nullopt;
  return d;
}

}  // namespace

ContactSet evaluate_contacts(const std::vector<Vec3>& positions, const std::vector<int>& nodes,
                             const GripperState& gripper, std::optional<double> platform_height,
                             const ContactParams& params, const FrictionAnchors* anchors,
                             std::vector<Vec3>* forces, std::vector<Mat3>* stiffness,
                             std::vector<fem::RankOneBlock>* rank_one) {
  ContactSet set;
  const double mu = params.friction;
  const double kt = params.tangential_stiffness;
  std::array<BodyFrame, 3> frames;
  for (int b = 0; b < 3; ++b) frames[b] = body_frame(static_cast<Body>(b), gripper, platform_height);

  for (int node : nodes) {
    const Vec3& x = positions[node];
    for (Body body : {Body::left, Body::right, Body::platform}) {
      const auto hit = probe(x, body, gripper, platform_height);
      if (!hit) continue;
      Contact c;
      c.node = node;
      c.body = body;
      c.point = hit->closest;
      c.normal = hit->normal;
      c.normal_force = params.stiffness * (-hit->distance);
      const Mat3 proj = Mat3::Identity() - c.normal * c.normal.transpose();
      Mat3 k_block = params.stiffness * c.normal * c.normal.transpose();
      Vec3 coupling = Vec3::Zero();  // -df_t/dx contains coupling * normal^T

      const std::optional<Anchor>* anchor = anchors ? &anchors->get(node, body) : nullptr;
      if (anchor && anchor->has_value() && (*anchor)->normal_force > 0.0 && mu > 0.0) {
        const Vec3 u = proj * (x - frames[static_cast<int>(body)].to_world((*anchor)->local));
        const double r = u.norm();
        const double radius = std::max(2.0 * mu * (*anchor)->normal_force / kt, params.min_slip_radius);
        const double scale = 1.0 / radius;
        const double s = scale * r;
        const double limit = mu * c.normal_force;
        if (s >= 1.0) {
          const Vec3 dir = u / r;
          c.tangential_force = -limit * dir;
          c.sliding = true;
          k_block += (limit / r) * (proj - dir * dir.transpose());
          coupling = -mu * params.stiffness * dir;
        } else if (r > 0.0) {
          const Vec3 dir = u / r;
          const double h = s * (2.0 - s);
          const double dh = 2.0 * scale * (1.0 - s);
          c.tangential_force = -limit * h * dir;
          k_block += limit * (dh * dir * dir.transpose() + (h / r) * (proj - dir * dir.transpose()));
          coupling = -mu * h * params.stiffness * dir;
        } else {
          k_block += limit * 2.0 * scale * proj;
        }
      }
      const auto basis = tangent_basis(c.normal);
      c.tangential = {c.tangential_force.dot(basis[0]), c.tangential_force.dot(basis[1])};
      if (forces) (*forces)[node] += c.force();
      if (stiffness) {
        if (rank_one) {
          if (!coupling.isZero(0.0)) rank_one->push_back({node, coupling, c.normal});
        } else {
          k_block += coupling * c.normal.transpose();
        }
        (*stiffness)[node] += k_block;
      }
      set.contacts.push_back(c);
    }
  }
  return set;
}

std::pair<std::vector<Vec3>, ContactSet> contact_forces(const fem::SimState& state, const mesh::TetMesh& mesh,
                                                         const GripperState& gripper,
                                                         std::optional<double> platform_height, double friction,
                                                         double stiffness, const FrictionAnchors* anchors) {
  if (!(stiffness > 0.0)) throw std::invalid_argument("contact stiffness must be positive");
  ContactParams params{stiffness, stiffness, friction};
  std::vector<Vec3> forces(state.positions.size(), Vec3::Zero());
  ContactSet set = evaluate_contacts(state.positions, mesh.surface_nodes(), gripper, platform_height, params,
                                     anchors, &forces, nullptr);
  return {std::move(forces), std::move(set)};
}

void commit_anchors(const ContactSet& set, const std::vector<Vec3>& positions, const GripperState& gripper,
                    std::optional<double> platform_height, const ContactParams& params, FrictionAnchors& anchors) {
  FrictionAnchors next(positions.size());
  for (const Contact& c : set.contacts) {
    const BodyFrame frame = body_frame(c.body, gripper, platform_height);
    const Vec3& x = positions[c.node];
    Vec3 anchor_world = x;
    const auto& previous = anchors.get(c.node, c.body);
    if (previous && previous->normal_force > 0.0) {
      anchor_world = frame.to_world(previous->local);
      if (c.sliding) {
        // Pull the anchor in to the saturation radius for the new normal force.
        const Vec3 u = (Mat3::Identity() - c.normal * c.normal.transpose()) * (x - anchor_world);
        const double radius =
            std::max(2.0 * params.friction * c.normal_force / params.tangential_stiffness, params.min_slip_radius);
        anchor_world = x - radius * u.normalized();
      }
    }
    next.set(c.node, c.body, {frame.to_local(anchor_world), c.normal_force});
  }
  anchors = std::move(next);
}

void ContactField::add_forces(const std::vector<Vec3>& x, std::vector<Vec3>& forces, std::vector<Mat3>* stiffness,
                              std::vector<fem::RankOneBlock>* rank_one) const {
  evaluate_contacts(x, nodes_, gripper_, platform_, params_, &anchors_, &forces, stiffness, rank_one);
}

}  // namespace graspsim::contact
