#pragma once

// First-order solver for the bound-constrained equilibrium problem:
// phase 1 alternates exact block minimizations, phase 2 runs a
// reduced-space Newton step on the full block system. Convergence is
// measured by the norm of the constrained (projected-gradient) residual.

#include <optional>
#include <vector>

#include "varstab/models.hpp"
#include "varstab/types.hpp"

namespace varstab::hybrid {

struct HybridParams {
  int max_it_amin = 500;
  int max_it_newton = 50;
  Real tol_residual = 1e-8;
  Real tol_alpha_increment = 1e-12;
  // Phase switch: residual falling below switch_threshold * (initial
  // residual norm) hands over to Newton.
  Real switch_threshold = 1e-3;

  void validate() const;
};

struct SolveReport {
  bool converged = false;
  int iterations_phase1 = 0;
  int iterations_phase2 = 0;
  std::vector<Real> residual_history;
  std::vector<Real> energy_history;
  std::optional<int> switch_index;
  Vector final_state;
};

struct ConstrainedResidual {
  Vector value;
  Real norm = 0.0;
};

/// Projected gradient of the energy at z:
///   free dofs            -> g_i
///   dofs at lower bound  -> min(g_i, 0)
///   dofs at upper bound  -> max(g_i, 0)
/// Its Euclidean norm vanishes exactly at KKT points. Throws InvalidState
/// if z violates the bounds by more than 1e-12.
ConstrainedResidual constrained_residual(const models::EnergyModel& model,
                                         const Vector& z,
                                         const models::Bounds& bounds);

/// Exact minimizer of 1/2 x^T H x + g0^T x over box [lower, upper] for
/// SPD H, by primal active-set iteration (solve free subsystem, clip,
/// update active set until the KKT conditions hold exactly).
Vector solve_bound_qp(const Matrix& H, const Vector& g0, const Vector& lower,
                      const Vector& upper, const Vector& x0);

/// Phase 1 only: alternate minimization until the residual reaches the
/// switch level (or the order-parameter increment stalls, or the cap).
SolveReport alternate_minimization(const models::EnergyModel& model,
                                   const Vector& z0,
                                   const models::Bounds& bounds,
                                   const HybridParams& params);

/// Two-phase hybrid solve: alternate minimization followed by
/// reduced-space Newton with projected backtracking. An indefinite
/// reduced Hessian triggers one more alternate-minimization sweep before
/// Newton is retried.
SolveReport solve_equilibrium(const models::EnergyModel& model,
                              const Vector& z0, const models::Bounds& bounds,
                              const HybridParams& params);

}  // namespace varstab::hybrid
