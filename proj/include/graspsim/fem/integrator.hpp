#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "graspsim/fem/state.hpp"

namespace graspsim::fem {

/// Node pinned to a prescribed position for the duration of a step.
struct NodeConstraint {
  int node = 0;
  Vec3 position = Vec3::Zero();
};

/// Position-dependent nodal force term coupled implicitly into the solve
/// (penalty contact). A node's force may depend only on that node's position.
/// Nonsymmetric stiffness term u v^T in one node's 3x3 block of -d(force)/dx.
struct RankOneBlock {
  int node = 0;
  Vec3 u = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

class ForceField {
 public:
  virtual ~ForceField() = default;

  /// Adds forces at positions `x` into `forces`. When `stiffness` is given,
  /// also adds the per-node 3x3 blocks of -d(force)/dx. With `rank_one` given,
  /// the blocks must be symmetric and any nonsymmetric remainder is appended
  /// there instead; without it everything goes into the blocks.
  virtual void add_forces(const std::vector<Vec3>& x, std::vector<Vec3>& forces, std::vector<Mat3>* stiffness,
                          std::vector<RankOneBlock>* rank_one) const = 0;
};

struct StepOptions {
  /// Cap on Newton iterations with a freshly factored matrix.
  int max_iterations = 20;
  /// Newton stops once the free-DOF residual norm drops below
  /// tolerance * characteristic force.
  double tolerance = 1e-6;
  /// Overrides FemModel::characteristic_force() when positive.
  double characteristic_force = 0.0;
  /// Rayleigh damping coefficients: mass (1/s) and stiffness (s).
  double mass_damping = 0.0;
  double stiffness_damping = 0.0;
  /// Keep the factored Newton matrix across iterations and steps while each
  /// reused solve shrinks the residual by at least reuse_contraction.
  bool reuse_factorization = true;
  double reuse_contraction = 0.4;
};

struct StepRequest {
  double dt = 1.0 / 1500.0;
  const std::vector<Vec3>* external_forces = nullptr;  // N per node
  std::vector<NodeConstraint> constraints;
  const ForceField* field = nullptr;
};

struct StepReport {
  int iterations = 0;
  double residual = 0.0;
  std::size_t inverted_elements = 0;
  int factorizations = 0;
};

/// Newton failed to reach the residual tolerance, or the linear solve broke down.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double residual, int iterations);
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Backward-Euler corotational integrator. Holds the sparse factorization
/// workspace for one model, so one instance belongs to one simulation thread.
class Integrator {
 public:
  explicit Integrator(const FemModel& model, StepOptions options = {});
  ~Integrator();
  Integrator(Integrator&&) noexcept;
  Integrator& operator=(Integrator&&) noexcept;

  const FemModel& model() const { return *model_; }
  const StepOptions& options() const { return options_; }

  /// One implicit step of length request.dt.
  SimState step(const SimState& state, const StepRequest& request);

  /// Static equilibrium under the request's loads and constraints (no inertia).
  SimState solve_static(const SimState& state, const StepRequest& request);

  const StepReport& last_report() const { return report_; }
  /// Forces the next solve to start from a fresh factorization.
  void reset_factorization();

 private:
  struct Workspace;

  SimState solve(const SimState& state, const StepRequest& request, bool dynamic);

  const FemModel* model_;
  StepOptions options_;
  std::unique_ptr<Workspace> work_;
  StepReport report_;
};

/// Convenience single step with a throwaway integrator.
SimState step(const FemModel& model, const SimState& state, double dt,
              const std::vector<Vec3>& external_forces,
              const std::vector<NodeConstraint>& constraints = {});

/// Per-node gravity loads m_i * g.
std::vector<Vec3> gravity_forces(const FemModel& model, const Vec3& gravity);

}  // namespace graspsim::fem
