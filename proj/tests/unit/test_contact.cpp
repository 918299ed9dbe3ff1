#include <gtest/gtest.h>

#include "cone_guard.hpp"

#include <cmath>
#include <random>

#include "graspsim/contact/slip_force.hpp"
#include "graspsim/contact/squeeze.hpp"
#include "graspsim/mesh/primitives.hpp"

using namespace graspsim;
using namespace graspsim::contact;

namespace {

// Side grasp across the 0.04 m width of a 0.08 x 0.04 x 0.02 prism resting on z = 0.
struct PrismGrasp {
  explicit PrismGrasp(double youngs, int res = 2)
      : model(fem::build_model(mesh::make_primitive({mesh::PrimitiveKind::prism, {0.08, 0.04, 0.02}}, res),
                               {1000.0, youngs, 0.3, 0.7})),
        world(model, GripperState::from_axes(Vec3(0.0, 0.0, 0.01), Vec3::UnitY(), Vec3::UnitX(), 0.042)) {
    world.platform() = 0.0;
  }
  fem::FemModel model;
  GraspWorld world;
};

// Brute-force distance from p to the pad box by dense sampling of its surface.
double sampled_box_distance(const Vec3& p, const GripperState& g, Body finger) {
  const Vec3 c = g.pad_center(finger);
  const Vec3 h(g.pad.half_thickness, g.pad.half_length, g.pad.half_width);
  double best = std::numeric_limits<double>::infinity();
  const int n = 60;
  for (int face = 0; face < 6; ++face) {
    const int axis = face / 2;
    const double sign = face % 2 ? 1.0 : -1.0;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        Vec3 q;
        q(axis) = sign * h(axis);
        q((axis + 1) % 3) = h((axis + 1) % 3) * (2.0 * i / n - 1.0);
        q((axis + 2) % 3) = h((axis + 2) % 3) * (2.0 * j / n - 1.0);
        best = std::min(best, (c + g.rotation * q - p).norm());
      }
    }
  }
  return best;
}

}  // namespace

TEST(FingerDistance, InnerFaceCenter) {
  GripperState g = GripperState::from_axes(Vec3(0.1, 0.2, 0.3), Vec3(1, 1, 0), Vec3(0, 0, 1), 0.04);
  for (Body f : kFingers) {
    const SignedDistance d = finger_signed_distance(g.face_center(f), g, f);
    EXPECT_NEAR(d.distance, 0.0, 1e-15);
    EXPECT_LE((d.normal - g.inward_normal(f)).norm(), 1e-12);
  }
}

TEST(FingerDistance, MidpointSymmetry) {
  GripperState g = GripperState::from_axes(Vec3::Zero(), Vec3::UnitY(), Vec3::UnitX(), 0.04);
  for (Body f : kFingers) {
    const SignedDistance d = finger_signed_distance(g.midpoint(), g, f);
    EXPECT_NEAR(d.distance, 0.02, 1e-15);
    EXPECT_LE((d.normal - g.inward_normal(f)).norm(), 1e-12);
  }
  EXPECT_LT(finger_signed_distance(g.pad_center(Body::left), g, Body::left).distance, 0.0);
}

TEST(FingerDistance, BeyondDistalEdgeMatchesSampling) {
  GripperState g = GripperState::from_axes(Vec3::Zero(), Vec3(0, 1, 1), Vec3(1, 0, 0), 0.03);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    // Points past the fingertip (beyond +half_length along roll) on the gap side.
    const Vec3 p = g.face_center(Body::left) + (g.pad.half_length + 0.001 + 0.01 * u(rng)) * g.roll() +
                   0.01 * u(rng) * g.inward_normal(Body::left) + 0.008 * (2 * u(rng) - 1) * g.binormal();
    const SignedDistance d = finger_signed_distance(p, g, Body::left);
    const auto edge = g.distal_edge(Body::left);
    EXPECT_NEAR(d.distance, point_segment_distance(p, edge[0], edge[1]), 1e-12);
    EXPECT_NEAR(d.distance, sampled_box_distance(p, g, Body::left), 2e-4);
    EXPECT_NEAR((d.closest - p).norm(), d.distance, 1e-12);
  }
}

TEST(ContactForces, NoPenetrationNoContacts) {
  auto m = mesh::make_primitive({mesh::PrimitiveKind::prism, {0.08, 0.04, 0.02}}, 1);
  fem::FemModel model = fem::build_model(m, {});
  fem::SimState s = fem::rest_state(model);
  for (Vec3& p : s.positions) p.z() += 0.001;
  GripperState g = GripperState::from_axes(Vec3(0, 0, 0.011), Vec3::UnitY(), Vec3::UnitX(), 0.05);
  auto [forces, set] = contact_forces(s, m, g, 0.0, 0.7, 1e5);
  EXPECT_TRUE(set.contacts.empty());
  for (const Vec3& f : forces) EXPECT_EQ(f, Vec3::Zero());
}

TEST(ContactForces, LinearPenaltyAndConeBoundary) {
  mesh::TetMesh tet({Vec3(0, 0, 0), Vec3(0.01, 0, 0), Vec3(0, 0.01, 0), Vec3(0, 0, 0.01)},
                    {mesh::Tet{0, 1, 2, 3}});
  fem::FemModel model = fem::build_model(tet, {});
  fem::SimState s = fem::rest_state(model);
  for (Vec3& p : s.positions) p.z() += 0.005;
  s.positions[0].z() = -0.001;  // 1 mm into the platform
  GripperState far = GripperState::from_axes(Vec3(0, 0, 1.0), Vec3::UnitY(), Vec3::UnitX(), 0.05);

  auto [forces, set] = contact_forces(s, tet, far, 0.0, 0.7, 1e4);
  ASSERT_EQ(set.contacts.size(), 1u);
  EXPECT_EQ(set.contacts[0].body, Body::platform);
  EXPECT_NEAR(set.contacts[0].normal_force, 10.0, 1e-9);
  EXPECT_LE((forces[0] - Vec3(0, 0, 10.0)).norm(), 1e-9);

  // Anchor 5 cm behind along -x: the stick spring saturates and friction opposes the +x slip.
  FrictionAnchors anchors(tet.num_nodes());
  anchors.set(0, Body::platform, {Vec3(-0.05, 0.0, 0.0), 10.0});
  auto [f2, sliding] = contact_forces(s, tet, far, 0.0, 0.7, 1e4, &anchors);
  ASSERT_EQ(sliding.contacts.size(), 1u);
  const Contact& c = sliding.contacts[0];
  EXPECT_TRUE(c.sliding);
  EXPECT_NEAR(c.tangential_force.norm(), 7.0, 1e-9);
  EXPECT_LT(c.tangential_force.x(), 0.0);
  EXPECT_NEAR(c.tangential.norm(), 7.0, 1e-9);
  EXPECT_TRUE(sliding.satisfies_coulomb(0.7));

  // Re-seated anchor lies on the cone boundary.
  commit_anchors(sliding, s.positions, far, 0.0, {1e4, 1e4, 0.7}, anchors);
  auto [f3, stick] = contact_forces(s, tet, far, 0.0, 0.7, 1e4, &anchors);
  EXPECT_NEAR(stick.contacts[0].tangential_force.norm(), 7.0, 1e-9);
  EXPECT_THROW(contact_forces(s, tet, far, 0.0, 0.7, 0.0), std::invalid_argument);
}

TEST(SqueezeForce, RequiredForce) {
  EXPECT_NEAR(required_squeeze_force(0.1, 0.7, 9.81), 1.3 * 0.1 * 9.81 / 0.7, 1e-15);
  EXPECT_NEAR(required_squeeze_force(0.1, 0.7, 9.81), 1.8219, 1e-4);
  EXPECT_EQ(required_squeeze_force(0.0, 0.7, 9.81), 0.0);
  EXPECT_NEAR(required_squeeze_force(0.1, 1.4, 9.81), 0.5 * required_squeeze_force(0.1, 0.7, 9.81), 1e-15);
  EXPECT_THROW(required_squeeze_force(0.1, 0.0, 9.81), std::invalid_argument);
}

TEST(SqueezeForce, SlipMomentTerm) {
  EXPECT_NEAR(slip_moment_force(0.1, 9.81, 0.02, 0.7, 0.01), 2.803, 1e-3);
  EXPECT_NEAR(slip_moment_force(0.1, 9.81, 0.02, 0.7, 0.02), 0.5 * slip_moment_force(0.1, 9.81, 0.02, 0.7, 0.01),
              1e-15);
  EXPECT_EQ(slip_moment_force(0.1, 9.81, 0.0, 0.7, 0.01), 0.0);
}

TEST(SqueezeForce, SlipEstimateFromPatches) {
  GripperState g = GripperState::from_axes(Vec3::Zero(), Vec3::UnitY(), Vec3::UnitX(), 0.04);
  std::vector<Vec3> pos{Vec3(-0.01, -0.02, 0), Vec3(0.01, -0.02, 0), Vec3(-0.01, 0.02, 0), Vec3(0.01, 0.02, 0)};
  ContactSet set;
  for (int i = 0; i < 4; ++i) {
    Contact c;
    c.node = i;
    c.body = i < 2 ? Body::left : Body::right;
    c.normal_force = 1.0;
    set.contacts.push_back(c);
  }
  const double fp = required_squeeze_force(0.1, 0.7);
  // COM on the grasp line.
  EXPECT_NEAR(estimate_slip_force(set, pos, Vec3(0, 0.005, 0), 0.1, 0.7, g).force, fp, 1e-15);
  // COM 2 cm below the line, half span 1 cm.
  SlipForceEstimate est = estimate_slip_force(set, pos, Vec3(0, 0, -0.02), 0.1, 0.7, g);
  EXPECT_NEAR(est.lever_arm, 0.02, 1e-15);
  EXPECT_NEAR(est.half_span, 0.01, 1e-15);
  EXPECT_NEAR(est.force, 0.1 * 9.81 * 0.02 / (0.7 * 0.01), 1e-12);
  // Point patches.
  for (Vec3& p : pos) p.x() = 0.0;
  est = estimate_slip_force(set, pos, Vec3(0, 0, -0.02), 0.1, 0.7, g);
  EXPECT_TRUE(est.degenerate);
  EXPECT_NEAR(est.force, 2 * fp, 1e-15);
  set.contacts.pop_back();
  set.contacts.pop_back();
  EXPECT_THROW(estimate_slip_force(set, pos, Vec3::Zero(), 0.1, 0.7, g), std::invalid_argument);
}

TEST(Controller, FilterConvergesToConstantInput) {
  const double alpha = 0.1;
  LowPassFilter f(alpha);
  const int steps = static_cast<int>(std::ceil(std::log(0.01) / std::log(1.0 - alpha)));
  for (int i = 0; i < steps; ++i) f.update(3.0);
  EXPECT_LE(std::abs(f.value() - 3.0), 0.01 * 3.0);
  EXPECT_THROW(LowPassFilter(0.0), std::invalid_argument);
}

TEST(Controller, EmptyGripperCrushes) {
  PrismGrasp rig(2e4, 1);
  rig.world.gripper() = GripperState::from_axes(Vec3(0.0, 0.0, 0.1), Vec3::UnitY(), Vec3::UnitX(), 0.01);
  try {
    squeeze_to_force(rig.world, 1.0);
    FAIL() << "expected crush";
  } catch (const SqueezeFailure& e) {
    EXPECT_EQ(e.reason(), SqueezeFailure::Reason::crush);
    EXPECT_LT(e.trajectory().separation_at_first_contact, 0.0);
  }
}

TEST(Controller, SoftPrismReachesTarget) {
  PrismGrasp rig(2e4);
  const double target = 1.82;
  SqueezeTrajectory traj = squeeze_to_force(rig.world, target);
  const ContactSet& c = rig.world.contacts();
  for (Body f : kFingers) {
    EXPECT_NEAR(c.normal_force(f), target, 0.05 * target) << to_string(f);
    EXPECT_GE(c.count(f), 1);
  }
  EXPECT_GT(traj.separation_at_first_contact, traj.separation_at_target);
  EXPECT_EQ(rig.world.cone_violations(), 0);

  // Third law: what the fingers push equals what the object receives.
  for (Body f : kFingers) {
    Vec3 on_object = Vec3::Zero();
    for (const Contact& k : c.contacts)
      if (k.body == f) on_object += k.force();
    const Vec3 on_finger = -c.force_on_object(f);
    EXPECT_LE((on_finger + on_object).norm(), 1e-9);
  }
}

TEST(Controller, FrozenJointsKeepSeparation) {
  PrismGrasp rig(2e5);
  ForceController controller(required_squeeze_force(rig.model.total_mass(), 0.7));
  squeeze_to_force(rig.world, controller, {});
  rig.world.gripper().joint_frozen = true;
  const double sep = rig.world.gripper().separation();
  for (int i = 0; i < 100; ++i) {
    rig.world.step();
    controller.update(rig.world);
    EXPECT_EQ(rig.world.gripper().separation(), sep);
  }
}

TEST(Controller, StaticHoldAfterPlatformRemoval) {
  for (double youngs : {2e4, 2e6}) {
    PrismGrasp rig(youngs);
    ForceController controller(required_squeeze_force(rig.model.total_mass(), 0.7));
    squeeze_to_force(rig.world, controller, {});
    rig.world.platform().reset();
    const double steps_per_second = 1.0 / rig.world.dt();
    // Let the load transfer settle, then measure drift over one second.
    for (int i = 0; i < 150; ++i) {
      rig.world.step();
      controller.update(rig.world);
    }
    const double z0 = rig.world.center_of_mass().z();
    for (int i = 0; i < steps_per_second; ++i) {
      rig.world.step();
      controller.update(rig.world);
    }
    EXPECT_LT(std::abs(rig.world.center_of_mass().z() - z0), 2e-3) << "E = " << youngs;
    EXPECT_EQ(rig.world.cone_violations(), 0);
  }
}
