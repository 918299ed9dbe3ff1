#include "graspsim/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "graspsim/fem/state.hpp"
#include "graspsim/metrics/rigid_fit.hpp"

namespace graspsim::metrics {

std::array<std::optional<double>, 7> GraspMetrics::values() const {
  return {pickup_success ? 1.0 : 0.0, max_stress,          max_deformation,
          strain_energy,              linear_instability, angular_instability,
          deformation_controllability};
}

void GraspMetrics::validate(double linear_cap, double angular_cap) const {
  for (const auto& v : values()) {
    if (v && (!std::isfinite(*v) || *v < 0.0)) throw std::domain_error("metric negative or not finite");
  }
  if (linear_instability && *linear_instability > linear_cap) throw std::domain_error("linear instability above cap");
  if (angular_instability && *angular_instability > angular_cap)
    throw std::domain_error("angular instability above cap");
}

std::optional<double> mean_valid(const protocols::ProtocolResult& result) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    const bool ok = i < result.valid.size() ? result.valid[i] != 0 : std::isfinite(result.values[i]);
    if (!ok) continue;
    sum += result.values[i];
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

GraspMetrics assemble_metrics(const fem::FemModel& model, const ProtocolResults& results) {
  if (!results.pickup) throw std::invalid_argument("metrics need a pickup result");
  GraspMetrics m;
  const protocols::ProtocolResult& pickup = *results.pickup;
  m.pickup_success = pickup.success;
  if (!pickup.success) return m;

  const protocols::FieldSnapshot* pre = pickup.find("pre_contact");
  const protocols::FieldSnapshot* post = pickup.find("post_pickup");
  if (!pre || !post) throw std::invalid_argument("pickup result lacks its snapshots");

  fem::SimState state;
  state.positions = post->positions;
  state.element_stress = post->stress;
  m.max_stress = fem::max_von_mises(state);
  m.strain_energy = fem::strain_energy(model, state);
  m.max_deformation = max_deformation(pre->positions, post->positions).max;

  if (results.linear && results.linear->success) m.linear_instability = mean_valid(*results.linear);
  if (results.angular && results.angular->success) m.angular_instability = mean_valid(*results.angular);
  if (results.reorientation && results.reorientation->success) {
    std::optional<double> worst;
    for (const protocols::FieldSnapshot& s : results.reorientation->snapshots) {
      const double d = max_deformation(pre->positions, s.positions).max;
      worst = std::max(worst.value_or(0.0), d);
    }
    m.deformation_controllability = worst;
  }
  return m;
}

}  // namespace graspsim::metrics
