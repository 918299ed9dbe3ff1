#include <gtest/gtest.h>

#include "cone_guard.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "graspsim/mesh/primitives.hpp"
#include "graspsim/metrics/features.hpp"
#include "graspsim/metrics/metrics.hpp"
#include "graspsim/metrics/rigid_fit.hpp"
#include "graspsim/protocols/pickup.hpp"
#include "graspsim/protocols/reorientation.hpp"

using namespace graspsim;
using namespace graspsim::metrics;

namespace {

std::vector<Vec3> random_cloud(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<Vec3> pts(n);
  for (Vec3& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  return pts;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

std::vector<Vec3> transform(const std::vector<Vec3>& pts, const Mat3& r, const Vec3& t) {
  std::vector<Vec3> out;
  for (const Vec3& p : pts) out.push_back(r * p + t);
  return out;
}

Mat3 rotation_vector(const Vec3& w) {
  const double a = w.norm();
  return a == 0.0 ? Mat3::Identity() : Eigen::AngleAxisd(a, w / a).toRotationMatrix();
}

// Independent oracle: minimizes the summed squared residual over rotation
// vectors by pattern search (translation optimal given the rotation), then
// reports the largest residual at the minimizer.
double brute_force_max_residual(const std::vector<Vec3>& pre, const std::vector<Vec3>& post) {
  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::size_t i = 0; i < pre.size(); ++i) {
    ca += pre[i];
    cb += post[i];
  }
  ca /= static_cast<double>(pre.size());
  cb /= static_cast<double>(pre.size());
  auto cost = [&](const Vec3& w) {
    const Mat3 r = rotation_vector(w);
    double s = 0.0;
    for (std::size_t i = 0; i < pre.size(); ++i) s += (r * (pre[i] - ca) + cb - post[i]).squaredNorm();
    return s;
  };
  Vec3 w = Vec3::Zero();
  double best = cost(w);
  for (double step = 0.1; step > 1e-13; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int k = 0; k < 3; ++k) {
        for (double sign : {1.0, -1.0}) {
          Vec3 trial = w;
          trial(k) += sign * step;
          const double c = cost(trial);
          if (c < best) {
            best = c;
            w = trial;
            improved = true;
          }
        }
      }
    }
  }
  const Mat3 r = rotation_vector(w);
  double worst = 0.0;
  for (std::size_t i = 0; i < pre.size(); ++i) worst = std::max(worst, (r * (pre[i] - ca) + cb - post[i]).norm());
  return worst;
}

contact::Contact pad_contact(contact::Body body, const Vec3& point, double force) {
  contact::Contact c;
  c.body = body;
  c.point = point;
  c.normal_force = force;
  return c;
}

contact::SqueezeTrajectory trajectory(double first, double target) {
  contact::SqueezeTrajectory t;
  t.separation_at_first_contact = first;
  t.separation_at_target = target;
  return t;
}

sampler::GraspPose pose(const Vec3& center, const Vec3& approach, const Vec3& roll, double width) {
  sampler::GraspPose g;
  g.center = center;
  g.approach = approach;
  g.roll = roll;
  g.width = width;
  g.separation = width + 0.004;
  return g;
}

fem::FemModel prism_model(double youngs) {
  return fem::build_model(mesh::make_primitive({mesh::PrimitiveKind::prism, {0.08, 0.04, 0.02}}, 2),
                          {1000.0, youngs, 0.3, 0.7});
}

}  // namespace

TEST(RigidFit, PureRigidMotionLeavesNoDeformation) {
  std::mt19937_64 rng(7);
  const auto mesh = mesh::make_primitive({mesh::PrimitiveKind::cylinder, {0.02, 0.06}}, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pre = trial % 2 ? random_cloud(50, trial) : mesh.nodes();
    const Vec3 t(0.3 * trial, -0.1, 0.05);
    const Deformation d = max_deformation(pre, transform(pre, random_rotation(rng), t));
    EXPECT_LE(d.max, 1e-10) << trial;
  }
}

TEST(RigidFit, UniformScaleMatchesAnalyticResidual) {
  for (double e : {1e-4, 1e-2, 0.1}) {
    const auto pre = random_cloud(40, 3);
    Vec3 c = Vec3::Zero();
    for (const Vec3& p : pre) c += p;
    c /= static_cast<double>(pre.size());
    std::vector<Vec3> post;
    double radius = 0.0;
    for (const Vec3& p : pre) {
      post.push_back(c + (1.0 + e) * (p - c));
      radius = std::max(radius, (p - c).norm());
    }
    EXPECT_NEAR(max_deformation(pre, post).max, e * radius, 1e-9) << e;
  }
}

TEST(RigidFit, SingleDisplacedNodeMatchesBruteForceFit) {
  for (int n : {8, 30, 200}) {
    auto pre = random_cloud(n, 11 + n);
    auto post = pre;
    const double delta = 1e-3;
    post[0] += Vec3(delta, 0.0, 0.0);
    const double got = max_deformation(pre, post).max;
    EXPECT_NEAR(got, brute_force_max_residual(pre, post), 1e-9) << n;
    EXPECT_LE(got, delta);
  }
  // With many nodes the displaced node keeps (1 - 1/N) of its offset.
  auto pre = random_cloud(2000, 5);
  auto post = pre;
  post[0] += Vec3(0.0, 1e-3, 0.0);
  EXPECT_NEAR(max_deformation(pre, post).max, 1e-3 * (1.0 - 1.0 / 2000.0), 2e-5);
}

TEST(RigidFit, InvariantToCommonRigidTransform) {
  std::mt19937_64 rng(19);
  const auto pre = random_cloud(60, 1);
  auto post = pre;
  std::normal_distribution<double> noise(0.0, 1e-3);
  for (Vec3& p : post) p += Vec3(noise(rng), noise(rng), noise(rng));
  const double base = max_deformation(pre, post).max;
  for (int trial = 0; trial < 5; ++trial) {
    const Mat3 r = random_rotation(rng);
    const Vec3 t(trial, 2.0, -1.0);
    EXPECT_NEAR(max_deformation(transform(pre, r, t), transform(post, r, t)).max, base, 1e-12);
  }
}

TEST(RigidFit, MirrorImageIsNotFitByAReflection) {
  const auto pre = random_cloud(30, 9);
  std::vector<Vec3> post;
  for (const Vec3& p : pre) post.emplace_back(-p.x(), p.y(), p.z());
  const RigidFit fit = fit_rigid(pre, post);
  EXPECT_NEAR(fit.rotation.determinant(), 1.0, 1e-12);
  EXPECT_GT(max_deformation(pre, post).max, 1e-3);
}

TEST(RigidFit, DegenerateInputsRejected) {
  const std::vector<Vec3> line{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)};
  EXPECT_THROW(fit_rigid(line, line), std::invalid_argument);
  EXPECT_THROW(fit_rigid({Vec3::Zero(), Vec3::UnitX()}, {Vec3::Zero(), Vec3::UnitX()}), std::invalid_argument);
  EXPECT_THROW(fit_rigid(random_cloud(5, 1), random_cloud(6, 1)), std::invalid_argument);
}

TEST(Features, SyntheticPatchesGiveClosedFormDistances) {
  // Gripper squeezing along y about the origin, roll along x, pads 0.01 m long.
  const auto g = contact::GripperState::from_axes(Vec3::Zero(), Vec3::UnitY(), Vec3::UnitX(), 0.03);
  contact::ContactSet set;
  // Left face at y = -0.015, right face at y = +0.015; two points each, unequal weights.
  set.contacts.push_back(pad_contact(contact::Body::left, Vec3(0.000, -0.015, 0.0), 1.0));
  set.contacts.push_back(pad_contact(contact::Body::left, Vec3(0.006, -0.015, 0.0), 2.0));
  set.contacts.push_back(pad_contact(contact::Body::right, Vec3(0.004, 0.015, 0.0), 3.0));
  const Vec3 com(0.0, 0.0, 0.002);
  const GraspFeatures f = compute_features(set, g, com, trajectory(0.034, 0.03));
  const Vec3 left(0.004, -0.015, 0.0), right(0.004, 0.015, 0.0);
  EXPECT_NEAR(f.pure_dist, 0.5 * ((left - com).norm() + (right - com).norm()), 1e-15);
  EXPECT_NEAR(f.perp_dist, std::hypot(0.004, 0.002), 1e-15);
  EXPECT_DOUBLE_EQ(f.num_contacts, 1.5);
  EXPECT_NEAR(f.edge_dist, 0.01 - 0.004, 1e-15);
  EXPECT_NEAR(f.squeeze_dist, 0.004, 1e-15);
  EXPECT_NEAR(f.gripper_sep, 0.03, 1e-15);
  EXPECT_NEAR(f.grav_align, std::numbers::pi / 2, 1e-15);
  EXPECT_NO_THROW(f.validate(0.08));
}

TEST(Features, GravityAlignmentFoldedAndRollInvariant) {
  EXPECT_EQ(gravity_alignment(Vec3::UnitZ()), 0.0);
  EXPECT_EQ(gravity_alignment(-Vec3::UnitZ()), 0.0);
  EXPECT_NEAR(gravity_alignment(Vec3(1, 0, 1)), std::numbers::pi / 4, 1e-15);
  EXPECT_NEAR(gravity_alignment(Vec3(1, 0, -1)), std::numbers::pi / 4, 1e-15);
  const Vec3 approach = Vec3(0.3, -0.5, 0.8).normalized();
  const Vec3 any = approach.unitOrthogonal();
  for (double roll = 0.0; roll < 6.0; roll += 0.7) {
    const Vec3 r = Eigen::AngleAxisd(roll, approach) * any;
    const auto g = contact::GripperState::from_axes(Vec3::Zero(), approach, r, 0.03);
    contact::ContactSet set;
    set.contacts.push_back(pad_contact(contact::Body::left, g.face_center(contact::Body::left), 1.0));
    set.contacts.push_back(pad_contact(contact::Body::right, g.face_center(contact::Body::right), 1.0));
    EXPECT_NEAR(compute_features(set, g, Vec3::Zero(), trajectory(0.03, 0.03)).grav_align,
                std::acos(0.8 / Vec3(0.3, -0.5, 0.8).norm()), 1e-12);
  }
}

TEST(Features, MissingFingerContactFails) {
  const auto g = contact::GripperState::from_axes(Vec3::Zero(), Vec3::UnitY(), Vec3::UnitX(), 0.03);
  contact::ContactSet set;
  set.contacts.push_back(pad_contact(contact::Body::left, Vec3(0, -0.015, 0), 1.0));
  set.contacts.push_back(pad_contact(contact::Body::right, Vec3(0, 0.015, 0), 0.0));
  EXPECT_THROW(compute_features(set, g, Vec3::Zero(), trajectory(0.03, 0.03)), FeatureError);
}

TEST(Features, CenteredSphereSideGrasp) {
  const double r = 0.02;
  const auto model = fem::build_model(mesh::make_primitive({mesh::PrimitiveKind::spheroid, {r, r}}, 3),
                                      {1000.0, 2e9, 0.3, 0.7});
  protocols::ProtocolConfig cfg;
  cfg.hold_time = 0.1;
  const auto out = protocols::run_pickup(model, pose(Vec3(0, 0, r), Vec3::UnitY(), Vec3::UnitX(), 2 * r), cfg);
  ASSERT_TRUE(out.capture.has_value()) << out.result.status();
  const auto& cap = *out.capture;
  const GraspFeatures f = compute_features(cap.contacts, cap.gripper, cap.center_of_mass, cap.trajectory);
  // The patch lies on the pad face, half the separation from the com.
  const double penetration = r - 0.5 * f.gripper_sep;
  EXPECT_GT(penetration, 0.0);
  EXPECT_LT(penetration, 1e-3);
  EXPECT_NEAR(f.pure_dist, r - penetration, 1e-4);
  EXPECT_LT(f.perp_dist, 1e-4);
  EXPECT_NEAR(f.grav_align, std::numbers::pi / 2, 1e-12);
  // Rigid limit: the fingers close only by the penalty penetration.
  EXPECT_LT(f.squeeze_dist, 1e-3);
  EXPECT_NO_THROW(f.validate(cap.gripper.max_opening));
}

TEST(Features, TopBottomGraspIsGravityAligned) {
  const auto model = prism_model(2e9);
  protocols::ProtocolConfig cfg;
  cfg.hold_time = 0.1;
  const auto out = protocols::run_pickup(model, pose(Vec3(0, 0, 0.01), Vec3::UnitZ(), Vec3::UnitX(), 0.02), cfg);
  ASSERT_TRUE(out.capture.has_value());
  const auto& cap = *out.capture;
  const GraspFeatures f = compute_features(cap.contacts, cap.gripper, cap.center_of_mass, cap.trajectory);
  EXPECT_EQ(f.grav_align, 0.0);
  EXPECT_LT(f.squeeze_dist, 1e-3);
}

TEST(Metrics, FailedPickupLeavesOtherMetricsAbsent) {
  protocols::ProtocolResult pickup;
  pickup.reason = "squeeze";
  protocols::ProtocolResult lin;
  lin.success = true;
  lin.values = {50.0};
  lin.valid = {1};
  const auto model = prism_model(2e6);
  const GraspMetrics m = assemble_metrics(model, {&pickup, nullptr, &lin, nullptr});
  EXPECT_FALSE(m.pickup_success);
  const auto v = m.values();
  EXPECT_EQ(v[0], 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_FALSE(v[i].has_value()) << GraspMetrics::kNames[i];
}

TEST(Metrics, InstabilityAveragesValidDirections) {
  protocols::ProtocolResult all_cap;
  all_cap.success = true;
  all_cap.values.assign(16, 50.0);
  all_cap.valid.assign(16, 1);
  EXPECT_EQ(mean_valid(all_cap), 50.0);

  protocols::ProtocolResult mixed;
  mixed.values = {10.0, std::numeric_limits<double>::quiet_NaN(), 30.0};
  mixed.valid = {1, 0, 1};
  EXPECT_EQ(mean_valid(mixed), 20.0);
  mixed.valid = {0, 0, 0};
  EXPECT_FALSE(mean_valid(mixed).has_value());
}

TEST(Metrics, AssembledFromStiffPickupAndReorientation) {
  const auto model = prism_model(2e9);
  protocols::ProtocolConfig cfg;
  cfg.hold_time = 0.5;
  const auto grasp = pose(Vec3(0.0, 0.0, 0.01), Vec3::UnitY(), Vec3::UnitX(), 0.04);
  const auto pick = protocols::run_pickup(model, grasp, cfg);
  ASSERT_TRUE(pick.result.success);
  const auto reo = protocols::run_reorientation(model, grasp, cfg, 2.0 * pick.capture->target);
  ASSERT_TRUE(reo.success);
  protocols::ProtocolResult lin;
  lin.success = true;
  lin.values.assign(16, 50.0);
  lin.valid.assign(16, 1);

  const GraspMetrics m = assemble_metrics(model, {&pick.result, &reo, &lin, nullptr});
  EXPECT_TRUE(m.pickup_success);
  ASSERT_TRUE(m.max_stress && m.max_deformation && m.strain_energy);
  EXPECT_GT(*m.max_stress, 0.0);
  EXPECT_GT(*m.strain_energy, 0.0);
  EXPECT_EQ(m.linear_instability, 50.0);
  EXPECT_FALSE(m.angular_instability.has_value());
  // Rigid limit: both deformation metrics stay below 0.1 mm.
  EXPECT_LT(*m.max_deformation, 1e-4);
  ASSERT_TRUE(m.deformation_controllability.has_value());
  EXPECT_LT(*m.deformation_controllability, 1e-4);
  EXPECT_NO_THROW(m.validate(cfg.linear_cap, cfg.angular_cap));
}

TEST(Metrics, DeformationShrinksWithStiffness) {
  protocols::ProtocolConfig cfg;
  cfg.hold_time = 0.3;
  const auto grasp = pose(Vec3(0.025, 0.0, 0.01), Vec3::UnitY(), Vec3::UnitX(), 0.04);
  double previous = std::numeric_limits<double>::infinity();
  for (double e : {2e4, 2e6, 2e9}) {
    const auto model = prism_model(e);
    const auto pick = protocols::run_pickup(model, grasp, cfg);
    ASSERT_TRUE(pick.result.success) << e << " " << pick.result.status();
    const GraspMetrics m = assemble_metrics(model, {&pick.result});
    EXPECT_LE(*m.max_deformation, previous) << e;
    previous = *m.max_deformation;
  }
}
