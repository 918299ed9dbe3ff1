#include "graspsim/fem/state.hpp"

#include <algorithm>
#include <cmath>

#include "graspsim/fem/polar.hpp"

namespace graspsim::fem {

namespace {

// Small strain and stress in the element's unrotated frame.
struct LocalResponse {
  Mat3 rotation;
  Mat3 strain;
  Mat3 stress;
};

LocalResponse local_response(const FemModel& model, std::size_t e, const std::vector<Vec3>& x) {
  const CorotatedFrame frame = corotated_frame(deformation_gradient(model, e, x));
  LocalResponse r;
  r.rotation = frame.rotation;
  r.strain = 0.5 * (frame.stretch + frame.stretch.transpose()) - Mat3::Identity();
  const auto& mat = model.material();
  r.stress = mat.lame_lambda() * r.strain.trace() * Mat3::Identity() + 2.0 * mat.lame_mu() * r.strain;
  return r;
}

}  // namespace

SimState rest_state(const FemModel& model) {
  SimState s;
  s.positions = model.mesh().nodes();
  s.velocities.assign(model.mesh().num_nodes(), Vec3::Zero());
  s.element_stress.assign(model.mesh().num_tets(), Mat3::Zero());
  return s;
}

Mat3 element_stress(const FemModel& model, std::size_t e, const std::vector<Vec3>& positions) {
  const LocalResponse r = local_response(model, e, positions);
  Mat3 sigma = r.rotation * r.stress * r.rotation.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

void update_stress(const FemModel& model, SimState& state) {
  state.element_stress.resize(model.mesh().num_tets());
  for (std::size_t e = 0; e < model.mesh().num_tets(); ++e) {
    state.element_stress[e] = element_stress(model, e, state.positions);
  }
}

double von_mises(const Mat3& s) {
  const Mat3 dev = s - (s.trace() / 3.0) * Mat3::Identity();
  return std::sqrt(std::max(0.0, 1.5 * dev.cwiseProduct(dev).sum()));
}

std::vector<double> von_mises_field(const SimState& state) {
  std::vector<double> out;
  out.reserve(state.element_stress.size());
  for (const Mat3& s : state.element_stress) out.push_back(von_mises(s));
  return out;
}

double max_von_mises(const SimState& state) {
  double m = 0.0;
  for (const Mat3& s : state.element_stress) m = std::max(m, von_mises(s));
  return m;
}

double strain_energy(const FemModel& model, const SimState& state) {
  double energy = 0.0;
  for (std::size_t e = 0; e < model.mesh().num_tets(); ++e) {
    const LocalResponse r = local_response(model, e, state.positions);
    energy += 0.5 * r.stress.cwiseProduct(r.strain).sum() * model.rest_volume(e);
  }
  return energy;
}

}  // namespace graspsim::fem
