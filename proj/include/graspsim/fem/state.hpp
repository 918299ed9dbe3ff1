#pragma once

#include <vector>

#include "graspsim/fem/model.hpp"

namespace graspsim::fem {

/// Nodal and elemental fields of one simulation instant.
struct SimState {
  std::vector<Vec3> positions;       // m
  std::vector<Vec3> velocities;      // m/s
  std::vector<Mat3> element_stress;  // Cauchy stress, Pa
  double time = 0.0;                 // s
};

/// Rest configuration at rest, zero stress.
SimState rest_state(const FemModel& model);

/// Corotated linear Cauchy stress of element `e`.
Mat3 element_stress(const FemModel& model, std::size_t e, const std::vector<Vec3>& positions);

/// Recomputes `state.element_stress` from `state.positions`.
void update_stress(const FemModel& model, SimState& state);

/// sqrt(3/2 dev(s):dev(s)).
double von_mises(const Mat3& stress);

std::vector<double> von_mises_field(const SimState& state);
double max_von_mises(const SimState& state);

/// Sum over elements of 1/2 sigma:eps * V with the corotated small strain.
double strain_energy(const FemModel& model, const SimState& state);

}  // namespace graspsim::fem
