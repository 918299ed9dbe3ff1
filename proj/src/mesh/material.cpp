#include "graspsim/mesh/material.hpp"

#include <stdexcept>

namespace graspsim::mesh {

void MaterialParams::validate() const {
  if (!(density > 0.0)) throw std::invalid_argument("density must be positive");
  if (!(youngs_modulus > 0.0)) throw std::invalid_argument("Young's modulus must be positive");
  if (!(poisson >= 0.0 && poisson < 0.5)) throw std::invalid_argument("Poisson ratio must be in [0, 0.5)");
  if (!(friction >= 0.0)) throw std::invalid_argument("friction coefficient must be non-negative");
}

double MaterialParams::lame_lambda() const {
  return youngs_modulus * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
}

double MaterialParams::lame_mu() const { return youngs_modulus / (2.0 * (1.0 + poisson)); }

}  // namespace graspsim::mesh
