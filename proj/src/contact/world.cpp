#include "graspsim/contact/world.hpp"

#include <atomic>

#include <spdlog/spdlog.h>

namespace graspsim::contact {

Vec3 fictitious_acceleration(const FrameMotion& frame, const Vec3& position, const Vec3& velocity) {
  const Vec3 r = position - frame.origin;
  const Vec3& w = frame.angular_velocity;
  return -(frame.acceleration + frame.angular_acceleration.cross(r) + w.cross(w.cross(r)) + 2.0 * w.cross(velocity));
}

GraspWorld::GraspWorld(const fem::FemModel& model, GripperState gripper, WorldOptions options)
    : integrator_(model, options.solver),
      options_(options),
      state_(fem::rest_state(model)),
      gripper_(gripper),
      anchors_(model.mesh().num_nodes()) {}

namespace {
std::atomic<long> g_cone_violations{0};
std::atomic<long> g_steps{0};
}  // namespace

long total_cone_violations() { return g_cone_violations.load(); }
long total_world_steps() { return g_steps.load(); }

void GraspWorld::step() {
  const long before = cone_violations_;
  try {
    advance(options_.dt);
  } catch (const fem::StepFailure& first) {
    const fem::SimState state = state_;
    const FrictionAnchors anchors = anchors_;
    const ContactSet contacts = contacts_;
    const long violations = cone_violations_;
    for (int level = 1;; ++level) {
      const int parts = 1 << level;
      spdlog::debug("step at t = {} s failed ({}); retrying as {} substeps", state.time, first.what(), parts);
      try {
        for (int k = 0; k < parts; ++k) advance(options_.dt / parts);
        break;
      } catch (const fem::StepFailure&) {
        state_ = state;
        anchors_ = anchors;
        contacts_ = contacts;
        cone_violations_ = violations;
        if (level >= options_.max_refinements) throw;
      }
    }
  }
  if (cone_violations_ > before) g_cone_violations += cone_violations_ - before;
  ++g_steps;
  ++steps_;
}

void GraspWorld::advance(double dt) {
  const fem::FemModel& m = model();
  const auto& masses = m.lumped_masses();
  const std::size_t nn = masses.size();

  loads_.resize(nn);
  const bool inertial = frame.is_inertial();
  for (std::size_t i = 0; i < nn; ++i) {
    Vec3 accel = gravity;
    if (!inertial) accel += fictitious_acceleration(frame, state_.positions[i], state_.velocities[i]);
    loads_[i] = masses[i] * accel;
  }

  const auto& surface = m.mesh().surface_nodes();
  ContactField field(surface, gripper_, platform_, options_.contact, anchors_);
  fem::StepRequest request;
  request.dt = dt;
  request.external_forces = &loads_;
  request.field = &field;
  fem::SimState next = integrator_.step(state_, request);

  ContactSet set = evaluate_contacts(next.positions, surface, gripper_, platform_, options_.contact, &anchors_,
                                     nullptr, nullptr);
  if (!set.satisfies_coulomb(options_.contact.friction)) {
    ++cone_violations_;
    spdlog::error("Coulomb cone violated at t = {} s", next.time);
  }
  commit_anchors(set, next.positions, gripper_, platform_, options_.contact, anchors_);
  contacts_ = std::move(set);
  state_ = std::move(next);
}

Vec3 GraspWorld::center_of_mass() const {
  const auto& masses = model().lumped_masses();
  Vec3 c = Vec3::Zero();
  for (std::size_t i = 0; i < masses.size(); ++i) c += masses[i] * state_.positions[i];
  return c / model().total_mass();
}

WorldSnapshot GraspWorld::snapshot() const {
  return {state_, gripper_, platform_, anchors_, contacts_, gravity, frame};
}

void GraspWorld::restore(const WorldSnapshot& snap) {
  state_ = snap.state;
  gripper_ = snap.gripper;
  platform_ = snap.platform;
  anchors_ = snap.anchors;
  contacts_ = snap.contacts;
  gravity = snap.gravity;
  frame = snap.frame;
  integrator_.reset_factorization();
}

}  // namespace graspsim::contact
