#pragma once

#include <optional>
#include <vector>

#include "graspsim/contact/contact_model.hpp"
#include "graspsim/fem/integrator.hpp"

namespace graspsim::contact {

/// Motion of the simulation frame relative to an inertial frame. Nodes feel
/// -m [a + alpha x r + omega x (omega x r) + 2 omega x v] with r measured from
/// `origin`.
struct FrameMotion {
  Vec3 acceleration = Vec3::Zero();          // m/s^2
  Vec3 angular_velocity = Vec3::Zero();      // rad/s
  Vec3 angular_acceleration = Vec3::Zero();  // rad/s^2
  Vec3 origin = Vec3::Zero();

  bool is_inertial() const {
    return acceleration.isZero(0.0) && angular_velocity.isZero(0.0) && angular_acceleration.isZero(0.0);
  }
};

/// Apparent acceleration a node at `position` moving with `velocity` feels in
/// the moving frame (gravity excluded).
Vec3 fictitious_acceleration(const FrameMotion& frame, const Vec3& position, const Vec3& velocity);

struct WorldOptions {
  double dt = 1.0 / 1500.0;
  ContactParams contact;
  fem::StepOptions solver;
  /// On a failed step, retry as 2, 4, ... substeps up to 2^max_refinements.
  int max_refinements = 2;
};

/// Everything needed to resume a GraspWorld exactly.
struct WorldSnapshot {
  fem::SimState state;
  GripperState gripper;
  std::optional<double> platform;
  FrictionAnchors anchors;
  ContactSet contacts;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  FrameMotion frame;
};

/// One deformable object, a kinematic parallel-jaw gripper and an optional
/// support platform, advanced together one implicit step at a time.
class GraspWorld {
 public:
  GraspWorld(const fem::FemModel& model, GripperState gripper, WorldOptions options = {});

  const fem::FemModel& model() const { return integrator_.model(); }
  const WorldOptions& options() const { return options_; }
  double dt() const { return options_.dt; }

  fem::SimState& state() { return state_; }
  const fem::SimState& state() const { return state_; }
  GripperState& gripper() { return gripper_; }
  const GripperState& gripper() const { return gripper_; }

  /// Top of the platform half-space; nullopt removes the platform.
  std::optional<double>& platform() { return platform_; }
  std::optional<double> platform() const { return platform_; }

  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
  FrameMotion frame;

  /// Advances one step of dt, splitting it into substeps when Newton fails.
  /// Throws fem::StepFailure if the finest split fails; the world is
  /// unchanged then.
  void step();

  /// Contacts at the end of the last step.
  const ContactSet& contacts() const { return contacts_; }
  const FrictionAnchors& anchors() const { return anchors_; }
  void clear_anchors() { anchors_.clear(); }

  /// Steps whose contact set left the Coulomb cone (should stay 0).
  long cone_violations() const { return cone_violations_; }
  long steps_taken() const { return steps_; }
  const fem::StepReport& last_report() const { return integrator_.last_report(); }

  Vec3 center_of_mass() const;

  WorldSnapshot snapshot() const;
  /// Resumes from `snap` and drops the solver's cached factorization, so the
  /// continuation does not depend on what ran before.
  void restore(const WorldSnapshot& snap);

 private:
  void advance(double dt);

  fem::Integrator integrator_;
  WorldOptions options_;
  fem::SimState state_;
  GripperState gripper_;
  std::optional<double> platform_;
  FrictionAnchors anchors_;
  ContactSet contacts_;
  std::vector<Vec3> loads_;
  long cone_violations_ = 0;
  long steps_ = 0;
};

/// Cone violations committed by every GraspWorld in this process, and the
/// steps they were checked over.
long total_cone_violations();
long total_world_steps();

}  // namespace graspsim::contact
