#include "graspsim/fem/integrator.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <Eigen/SparseCore>
#include <spdlog/spdlog.h>

#include "graspsim/fem/polar.hpp"

namespace graspsim::fem {

StepFailure::StepFailure(const std::string& what, double residual, int iterations)
    : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                         std::to_string(iterations) + " iterations)"),
      residual_(residual),
      iterations_(iterations) {}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

int find_slot(const SparseMatrix& a, int row, int col) {
  const int* inner = a.innerIndexPtr();
  const int* begin = inner + a.outerIndexPtr()[col];
  const int* end = inner + a.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(begin, end, row);
  return static_cast<int>(it - inner);
}

}  // namespace

struct Integrator::Workspace {
  SparseMatrix matrix;
  std::vector<std::array<int, 144>> element_slots;
  std::vector<std::array<int, 9>> node_slots;
  Eigen::SimplicialLDLT<SparseMatrix> solver;
  // Full nonsymmetric matrix, only for the fallback when the low-rank update
  // is singular.
  Eigen::SparseLU<SparseMatrix> lu;
  bool lu_analyzed = false;

  // Current factorization: LDLT of the symmetric part plus the Woodbury data
  // for the rank-one terms, or the full LU when use_lu is set.
  bool factor_valid = false;
  bool use_lu = false;
  std::vector<RankOneBlock> terms;
  Eigen::MatrixXd low_rank;  // B^-1 U
  Eigen::PartialPivLU<Eigen::MatrixXd> capacitance;
  std::vector<char> factor_fixed;
  double factor_dt = 0.0;
  bool factor_dynamic = true;
  bool factor_field = false;
  int factorizations = 0;

  // Per-solve inputs.
  const std::vector<Vec3>* start_positions = nullptr;
  const std::vector<Vec3>* start_velocities = nullptr;
  const StepRequest* request = nullptr;
  std::vector<char> fixed;
  bool dynamic = true;

  // Scratch.
  std::vector<Vec3> forces;
  std::vector<Mat3> field_stiffness;
  std::vector<Mat3> rotations;
  std::vector<RankOneBlock> rank_one;
  Eigen::VectorXd residual;
  std::size_t inverted = 0;
};

Integrator::Integrator(const FemModel& model, StepOptions options)
    : model_(&model), options_(options), work_(std::make_unique<Workspace>()) {
  const auto& tets = model.mesh().tets();
  const int n = static_cast<int>(model.num_dofs());

  std::vector<Eigen::Triplet<double>> pattern;
  pattern.reserve(tets.size() * 144);
  for (const mesh::Tet& t : tets) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) pattern.emplace_back(3 * t[a] + i, 3 * t[b] + j, 0.0);
  }
  Workspace& w = *work_;
  w.matrix.resize(n, n);
  w.matrix.setFromTriplets(pattern.begin(), pattern.end());
  w.matrix.makeCompressed();

  w.element_slots.resize(tets.size());
  for (std::size_t e = 0; e < tets.size(); ++e) {
    const mesh::Tet& t = tets[e];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            w.element_slots[e][(3 * a + i) * 12 + 3 * b + j] =
                find_slot(w.matrix, 3 * t[a] + i, 3 * t[b] + j);
  }
  w.node_slots.resize(model.mesh().num_nodes());
  for (int v = 0; v < static_cast<int>(model.mesh().num_nodes()); ++v) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) w.node_slots[v][3 * i + j] = find_slot(w.matrix, 3 * v + i, 3 * v + j);
  }
  w.solver.analyzePattern(w.matrix);
}

Integrator::~Integrator() = default;
Integrator::Integrator(Integrator&&) noexcept = default;
Integrator& Integrator::operator=(Integrator&&) noexcept = default;

void Integrator::reset_factorization() { work_->factor_valid = false; }

SimState Integrator::step(const SimState& state, const StepRequest& request) {
  if (!(request.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  return solve(state, request, true);
}

SimState Integrator::solve_static(const SimState& state, const StepRequest& request) {
  return solve(state, request, false);
}

SimState Integrator::solve(const SimState& state, const StepRequest& request, bool dynamic) {
  const FemModel& model = *model_;
  Workspace& w = *work_;
  const std::size_t nn = model.mesh().num_nodes();
  const auto& tets = model.mesh().tets();
  const auto& rest = model.mesh().nodes();
  const auto& masses = model.lumped_masses();
  const double dt = request.dt;

  if (request.external_forces && request.external_forces->size() != nn) {
    throw std::invalid_argument("external force array does not match node count");
  }

  w.start_positions = &state.positions;
  w.start_velocities = &state.velocities;
  w.request = &request;
  w.dynamic = dynamic;
  w.fixed.assign(nn, 0);
  for (const NodeConstraint& c : request.constraints) w.fixed.at(c.node) = 1;

  const double elastic_scale = dynamic ? 1.0 + options_.stiffness_damping / dt : 1.0;
  const double mass_scale = dynamic ? 1.0 / (dt * dt) + options_.mass_damping / dt : 0.0;

  // Residual (net force minus inertia) at x. Element rotations and field
  // stiffness are cached so assemble() can build the Newton matrix at the same x
  // without repeating the polar decompositions.
  auto evaluate = [&](const std::vector<Vec3>& x) {
    w.forces.assign(nn, Vec3::Zero());
    w.rotations.resize(tets.size());
    w.inverted = 0;

    Eigen::Matrix<double, 12, 1> u, v, f;
    for (std::size_t e = 0; e < tets.size(); ++e) {
      const mesh::Tet& t = tets[e];
      const CorotatedFrame frame = corotated_frame(deformation_gradient(model, e, x));
      if (frame.inverted) ++w.inverted;
      const Mat3& r = frame.rotation;
      w.rotations[e] = r;
      const Mat12& k = model.element_stiffness(e);

      for (int a = 0; a < 4; ++a) u.segment<3>(3 * a) = r.transpose() * x[t[a]] - rest[t[a]];
      f.noalias() = k * u;
      if (dynamic && options_.stiffness_damping > 0.0) {
        for (int a = 0; a < 4; ++a) {
          v.segment<3>(3 * a) = r.transpose() * (x[t[a]] - (*w.start_positions)[t[a]]) / dt;
        }
        f.noalias() += options_.stiffness_damping * (k * v);
      }
      for (int a = 0; a < 4; ++a) w.forces[t[a]] -= r * f.segment<3>(3 * a);
    }

    if (request.external_forces) {
      for (std::size_t i = 0; i < nn; ++i) w.forces[i] += (*request.external_forces)[i];
    }
    if (request.field) {
      w.field_stiffness.assign(nn, Mat3::Zero());
      w.rank_one.clear();
      request.field->add_forces(x, w.forces, &w.field_stiffness, &w.rank_one);
    }
    if (dynamic) {
      for (std::size_t i = 0; i < nn; ++i) {
        const Vec3 dx = x[i] - (*w.start_positions)[i];
        w.forces[i] -= masses[i] * ((dx - dt * (*w.start_velocities)[i]) / (dt * dt) +
                                    options_.mass_damping * dx / dt);
      }
    }

    w.residual.resize(3 * nn);
    for (std::size_t i = 0; i < nn; ++i) {
      w.residual.segment<3>(3 * i) = w.fixed[i] ? Vec3::Zero() : w.forces[i];
    }
    return w.residual.norm();
  };

  // Newton matrix at the point of the last evaluate() call.
  auto assemble = [&]() {
    double* values = w.matrix.valuePtr();
    std::fill(values, values + w.matrix.nonZeros(), 0.0);
    for (std::size_t e = 0; e < tets.size(); ++e) {
      const Mat3& r = w.rotations[e];
      const Mat12& k = model.element_stiffness(e);
      const auto& slots = w.element_slots[e];
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          const Mat3 block = elastic_scale * (r * k.block<3, 3>(3 * a, 3 * b) * r.transpose());
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) values[slots[(3 * a + i) * 12 + 3 * b + j]] += block(i, j);
        }
      }
    }
    if (request.field) {
      for (std::size_t i = 0; i < nn; ++i) {
        for (int q = 0; q < 9; ++q) values[w.node_slots[i][q]] += w.field_stiffness[i](q / 3, q % 3);
      }
    }
    if (dynamic) {
      for (std::size_t i = 0; i < nn; ++i) {
        for (int q = 0; q < 3; ++q) values[w.node_slots[i][4 * q]] += masses[i] * mass_scale;
      }
    }
  };

  auto apply_constraints_to_matrix = [&]() {
    double* values = w.matrix.valuePtr();
    const int* outer = w.matrix.outerIndexPtr();
    const int* inner = w.matrix.innerIndexPtr();
    for (std::size_t node = 0; node < nn; ++node) {
      if (!w.fixed[node]) continue;
      for (int c = 0; c < 3; ++c) {
        const int dof = 3 * static_cast<int>(node) + c;
        for (int s = outer[dof]; s < outer[dof + 1]; ++s) {
          const int row = inner[s];
          values[s] = (row == dof) ? 1.0 : 0.0;
          if (row != dof) values[find_slot(w.matrix, dof, row)] = 0.0;
        }
      }
    }
  };

  std::vector<Vec3> x = state.positions;
  if (dynamic) {
    for (std::size_t i = 0; i < nn; ++i) x[i] += dt * state.velocities[i];
  }
  for (const NodeConstraint& c : request.constraints) x[c.node] = c.position;

  const double force_scale =
      options_.characteristic_force > 0.0 ? options_.characteristic_force : model.characteristic_force();
  const double tolerance = options_.tolerance * force_scale;

  // The factored Newton matrix is kept across iterations and steps and only
  // rebuilt when a reused one stops contracting the residual fast enough, or
  // when the constraint set or time step changed.
  const bool same_system = w.factor_valid && w.factor_fixed == w.fixed && w.factor_dt == dt &&
                           w.factor_dynamic == dynamic && w.factor_field == (request.field != nullptr);
  if (!options_.reuse_factorization || !same_system) w.factor_valid = false;

  auto factor = [&]() {
    assemble();
    apply_constraints_to_matrix();
    w.factor_valid = false;
    w.use_lu = false;
    w.terms.clear();
    w.solver.factorize(w.matrix);
    if (w.solver.info() != Eigen::Success) return false;
    for (const RankOneBlock& t : w.rank_one) {
      if (!w.fixed[t.node]) w.terms.push_back(t);
    }
    if (!w.terms.empty()) {
      // A = B + sum u_i v_i^T with B symmetric: Woodbury identity on top of the
      // LDLT of B.
      const int m = static_cast<int>(w.terms.size());
      Eigen::MatrixXd u = Eigen::MatrixXd::Zero(3 * nn, m);
      for (int j = 0; j < m; ++j) u.block<3, 1>(3 * w.terms[j].node, j) = w.terms[j].u;
      w.low_rank = w.solver.solve(u);
      Eigen::MatrixXd capacitance = Eigen::MatrixXd::Identity(m, m);
      for (int i = 0; i < m; ++i) {
        capacitance.row(i) += w.terms[i].v.transpose() * w.low_rank.middleRows<3>(3 * w.terms[i].node);
      }
      w.capacitance.compute(capacitance);
      const double rcond = w.capacitance.rcond();
      if (!(rcond > 1e-12)) {
        spdlog::debug("low-rank update ill-conditioned (rcond {:.2e}); using sparse LU", rcond);
        for (const RankOneBlock& t : w.terms) {
          const Mat3 block = t.u * t.v.transpose();
          for (int q = 0; q < 9; ++q) w.matrix.valuePtr()[w.node_slots[t.node][q]] += block(q / 3, q % 3);
        }
        if (!w.lu_analyzed) {
          w.lu.analyzePattern(w.matrix);
          w.lu_analyzed = true;
        }
        w.lu.factorize(w.matrix);
        if (w.lu.info() != Eigen::Success) return false;
        w.use_lu = true;
      }
    }
    w.factor_valid = true;
    w.factor_fixed = w.fixed;
    w.factor_dt = dt;
    w.factor_dynamic = dynamic;
    w.factor_field = request.field != nullptr;
    ++w.factorizations;
    return true;
  };

  auto apply_inverse = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    if (w.use_lu) return w.lu.solve(rhs);
    Eigen::VectorXd y = w.solver.solve(rhs);
    if (!w.terms.empty()) {
      Eigen::VectorXd vy(w.terms.size());
      for (std::size_t i = 0; i < w.terms.size(); ++i) vy(i) = w.terms[i].v.dot(y.segment<3>(3 * w.terms[i].node));
      y -= w.low_rank * w.capacitance.solve(vy);
    }
    return y;
  };

  w.factorizations = 0;
  double norm = evaluate(x);
  int iterations = 0;
  int fresh_iterations = 0;  // reused-matrix steps contract by a fixed factor, so only these need a cap
  std::vector<Vec3> trial(nn);
  while (!(norm < tolerance)) {
    if (fresh_iterations >= options_.max_iterations || !std::isfinite(norm)) {
      report_ = {iterations, norm, w.inverted, w.factorizations};
      throw StepFailure("Newton did not converge", norm, iterations);
    }
    const bool fresh = !w.factor_valid;
    if (fresh && !factor()) {
      report_ = {iterations, norm, w.inverted, w.factorizations};
      throw StepFailure("linear solve breakdown", norm, iterations);
    }
    const Eigen::VectorXd delta = apply_inverse(w.residual);
    if (!delta.allFinite()) {
      report_ = {iterations, norm, w.inverted, w.factorizations};
      throw StepFailure("linear solve breakdown", norm, iterations);
    }

    double scale = 1.0;
    double trial_norm = norm;
    for (int halving = 0; halving < (fresh ? 5 : 1); ++halving) {
      for (std::size_t i = 0; i < nn; ++i) trial[i] = x[i] + scale * delta.segment<3>(3 * i);
      trial_norm = evaluate(trial);
      if (trial_norm <= norm) break;
      scale *= 0.5;
    }
    ++iterations;
    if (fresh) ++fresh_iterations;
    if (!fresh && !(trial_norm <= options_.reuse_contraction * norm)) {
      // The reused matrix is too far off: discard the step and refactor.
      w.factor_valid = false;
      norm = evaluate(x);
      continue;
    }
    // A damped step means the matrix does not describe the neighbourhood well.
    if (fresh && scale < 1.0) w.factor_valid = false;
    x.swap(trial);
    norm = trial_norm;
    spdlog::trace("newton iteration {}: residual {:.3e} (step scale {}{})", iterations, norm, scale,
                  fresh ? "" : ", reused matrix");
  }

  report_ = {iterations, norm, w.inverted, w.factorizations};
  if (w.inverted > 0) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
      spdlog::warn("{} inverted element(s); stretch clamped to continue", w.inverted);
    } else {
      spdlog::debug("{} inverted element(s); stretch clamped to continue", w.inverted);
    }
  }

  SimState next;
  next.positions = std::move(x);
  next.velocities.assign(nn, Vec3::Zero());
  if (dynamic) {
    for (std::size_t i = 0; i < nn; ++i) {
      next.velocities[i] = (next.positions[i] - state.positions[i]) / dt;
    }
  }
  next.time = dynamic ? state.time + dt : state.time;
  update_stress(model, next);
  return next;
}

SimState step(const FemModel& model, const SimState& state, double dt,
              const std::vector<Vec3>& external_forces, const std::vector<NodeConstraint>& constraints) {
  Integrator integrator(model);
  StepRequest request;
  request.dt = dt;
  request.external_forces = &external_forces;
  request.constraints = constraints;
  return integrator.step(state, request);
}

std::vector<Vec3> gravity_forces(const FemModel& model, const Vec3& gravity) {
  std::vector<Vec3> f;
  f.reserve(model.mesh().num_nodes());
  for (double m : model.lumped_masses()) f.push_back(m * gravity);
  return f;
}

}  // namespace graspsim::fem
