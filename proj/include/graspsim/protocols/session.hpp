#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graspsim/contact/squeeze.hpp"
#include "graspsim/protocols/protocol_config.hpp"
#include "graspsim/sampler/antipodal.hpp"

namespace graspsim::protocols {

enum class TestId { pickup, reorient, linear, angular };
const char* to_string(TestId test);

/// Nodal positions and element stresses at one labelled instant.
struct FieldSnapshot {
  std::string label;
  double time = 0.0;
  std::vector<Vec3> positions;
  std::vector<Mat3> stress;
};

/// Outcome of one test. `values`/`valid` carry the per-direction loss
/// accelerations (linear, angular) or a per-state completion flag
/// (reorientation, value = state angle).
struct ProtocolResult {
  TestId test = TestId::pickup;
  bool success = false;
  std::string reason;  // failure reason, empty on success
  std::vector<FieldSnapshot> snapshots;
  std::vector<double> values;
  std::vector<char> valid;

  /// "success" or "fail(<reason>)".
  std::string status() const;
  const FieldSnapshot* find(const std::string& label) const;
};

/// State right after the squeeze converged at the pickup force, before the
/// platform moves: the input of the grasp features.
struct SqueezeCapture {
  double target = 0.0;
  contact::ContactSet contacts;
  std::vector<Vec3> positions;
  contact::GripperState gripper;
  Vec3 center_of_mass = Vec3::Zero();
  contact::SqueezeTrajectory trajectory;
};

/// Counts consecutive steps in which either finger has no contact point.
class LossDetector {
 public:
  explicit LossDetector(int debounce) : debounce_(debounce) {}
  /// Returns true once the loss has lasted `debounce` steps; `window_start`
  /// then holds the index passed with the first step of that window.
  bool update(const contact::ContactSet& contacts, long step_index);
  long window_start() const { return window_start_; }
  void reset() { run_ = 0; }

 private:
  int debounce_;
  int run_ = 0;
  long window_start_ = -1;
};

/// World options used by every protocol for a given model.
contact::WorldOptions world_options(const fem::FemModel& model, const ProtocolConfig& config);

/// Fresh world: object at rest on a platform at its lowest point, gripper
/// opened at the grasp pose.
contact::GraspWorld make_world(const fem::FemModel& model, const sampler::GraspPose& grasp,
                               const ProtocolConfig& config);

FieldSnapshot capture_fields(const contact::GraspWorld& world, std::string label);

/// Steps the world with the controller active, lowering the platform on the
/// configured schedule. Returns false if a finger lost contact meanwhile.
bool lower_platform(contact::GraspWorld& world, contact::ForceController& controller,
                    const ProtocolConfig& config);

}  // namespace graspsim::protocols
