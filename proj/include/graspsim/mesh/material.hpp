#pragma once

namespace graspsim::mesh {

/// Homogeneous isotropic material: density kg/m^3, Young's modulus Pa,
/// Poisson ratio and Coulomb friction coefficient (dimensionless).
struct MaterialParams {
  double density = 1000.0;
  double youngs_modulus = 2e4;
  double poisson = 0.3;
  double friction = 0.7;

  /// Throws std::invalid_argument unless rho > 0, E > 0, 0 <= nu < 0.5, mu >= 0.
  void validate() const;
  double lame_lambda() const;
  double lame_mu() const;
};

}  // namespace graspsim::mesh
