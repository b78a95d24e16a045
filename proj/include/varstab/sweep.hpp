#pragma once

// Benchmark drivers and the parameter sweep: space minimum through the
// bifurcation solver, cone minimum through the projection-scaling
// iteration (warm-started through a mesh cascade), support measurement,
// closed-form references, and CSV/JSON emission.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <string>
#include <vector>

#include "varstab/bifurcation.hpp"
#include "varstab/models.hpp"
#include "varstab/reference.hpp"
#include "varstab/stability.hpp"

namespace varstab::sweep {

using SparseMatrix = Eigen::SparseMatrix<Real>;

/// Reduced benchmark pencil on the order-parameter block: the kinematic
/// block is eliminated exactly (it is unconstrained in the cone), leaving
///   S = a K + b c^2 (M - G_r^T K_vv^{-1} G_r)   against   M.
/// Applications stay O(n) through the sparse stiffness factorization.
class RayleighReducedPencil {
 public:
  RayleighReducedPencil(const models::RayleighQuotientModel& model,
                        Index n_cells);

  Index dim() const { return mesh_->n_nodes(); }
  const std::shared_ptr<const fem1d::IntervalMesh>& mesh() const {
    return mesh_;
  }
  const models::RayleighQuotientModel& model() const { return model_; }

  Vector apply_S(const Vector& w) const;
  Vector apply_M(const Vector& w) const;
  Matrix dense_S() const;
  Matrix dense_M() const;

  /// Kinematic minimizer for a given order-parameter field:
  /// v = c K_vv^{-1} G_r beta (interior dofs).
  Vector reconstruct_v(const Vector& beta) const;

  stability::LinearOperator S_operator() const;
  stability::LinearOperator M_operator() const;

 private:
  models::RayleighQuotientModel model_;
  std::shared_ptr<const fem1d::IntervalMesh> mesh_;
  SparseMatrix K_, M_, Gr_;
  Eigen::SimplicialLDLT<SparseMatrix> Kvv_;
};

struct RayleighConeOptions {
  Index n_coarse_max = 64;  // coarsest cascade level
  Index level_factor = 4;
  stability::ConeParams coarse;  // cold-start level parameters
  stability::ConeParams mid;
  stability::ConeParams fine;

  RayleighConeOptions();
};

/// Cone minimum of the benchmark ratio at n_cells, warm-started through
/// a cascade of coarser meshes (cold multistart at the coarsest level,
/// nodal prolongation in between). `state` carries the minimizing pair
/// (v, beta) as nodal fields on the finest mesh; v is recovered from the
/// kinematic minimization and extended by its boundary zeros.
struct RayleighConeSolve {
  stability::ConeResult result;  // finest-level iteration
  fem1d::BlockState state;
  Real lambda = 0.0;
  int total_iterations = 0;
  std::vector<Index> level_cells;
};

RayleighConeSolve solve_rayleigh_cone(const models::RayleighQuotientModel& model,
                                      Index n_cells,
                                      const RayleighConeOptions& options = {});

/// Space minimum of the benchmark ratio: full pencil, full inactive set,
/// bifurcation solve for the k lowest eigenpairs.
struct RayleighSpaceSolve {
  bifurcation::Spectrum spectrum;
  models::RayleighSystem system;
  Real lambda = 0.0;
};

RayleighSpaceSolve solve_rayleigh_space(
    const models::RayleighQuotientModel& model, Index n_cells, int k = 1,
    const bifurcation::BifurcationOptions& options = {});

/// One grid point of the phase-diagram sweep (axes pi^2 a and b c^2).
struct SweepRecord {
  Real a = 0, b = 0, c = 0;
  Real pi2a = 0, bc2 = 0;
  Real R_space_num = 0, R_space_ref = 0;
  Real R_cone_num = 0, R_cone_ref = 0;
  Real D_num = 0, D_ref = 0;
  reference::Branch branch_ref = reference::Branch::constant;
  bool converged_space = false;
  bool converged_cone = false;
  int iters_cone = 0;

  // cone KKT diagnostics (JSON mirror only; the CSV column set is fixed)
  Real complementarity = 0;
  Real dual_violation = 0;
  Real residual_norm = 0;
};

struct SweepConfig {
  std::vector<Real> pi2a_grid;
  std::vector<Real> bc2_grid;
  Index n_cells = 1000;
  Real b = 1.0;  // c is derived from bc2; only the products matter
  Real support_epsilon = 1e-6;
  RayleighConeOptions cone;
  bifurcation::BifurcationOptions eig;
};

/// Runs both solvers on every grid point; per-point failures are flagged
/// in the record, never dropped. Records are ordered by grid index
/// (pi2a-major).
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRecord>& records);
void write_sweep_json(const std::string& path,
                      const std::vector<SweepRecord>& records);
void write_history_csv(const std::string& path,
                       const std::vector<stability::ConeIterate>& history);

/// MIN:MAX:COUNT grid specification (linear spacing).
std::vector<Real> parse_grid_spec(const std::string& spec);

}  // namespace varstab::sweep
