#pragma once

#include <array>
#include <optional>

#include "graspsim/protocols/session.hpp"

namespace graspsim::metrics {

/// Performance of one grasp. A metric is empty when the test it needs did
/// not run or failed; every metric except pickup_success is empty when the
/// pickup failed.
struct GraspMetrics {
  bool pickup_success = false;
  std::optional<double> max_stress;                   // Pa, von Mises
  std::optional<double> max_deformation;              // m
  std::optional<double> strain_energy;                // J
  std::optional<double> linear_instability;           // m/s^2
  std::optional<double> angular_instability;          // rad/s^2
  std::optional<double> deformation_controllability;  // m

  static constexpr std::array<const char*, 7> kNames{
      "pickup_success",      "max_stress",          "max_deformation",           "strain_energy",
      "linear_instability", "angular_instability", "deformation_controllability"};
  /// Same order as kNames; pickup_success as 0 or 1.
  std::array<std::optional<double>, 7> values() const;

  /// Throws std::domain_error for negative values or instabilities above the caps.
  void validate(double linear_cap, double angular_cap) const;
};

struct ProtocolResults {
  const protocols::ProtocolResult* pickup = nullptr;
  const protocols::ProtocolResult* reorientation = nullptr;
  const protocols::ProtocolResult* linear = nullptr;
  const protocols::ProtocolResult* angular = nullptr;
};

/// Mean of the valid entries; empty when none is valid.
std::optional<double> mean_valid(const protocols::ProtocolResult& result);

/// Metrics from the protocol outputs. Deformations are measured against the
/// "pre_contact" snapshot; stress and energy at "post_pickup". Controllability
/// is the largest deformation over the reorientation states that held.
/// Throws std::invalid_argument without a pickup result.
GraspMetrics assemble_metrics(const fem::FemModel& model, const ProtocolResults& results);

}  // namespace graspsim::metrics
