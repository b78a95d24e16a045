#pragma once

// Cone-constrained eigenvalue solver: the projection-and-scaling
// iteration on a symmetric pencil over the cone
//   { z : order-parameter components >= 0 },
// returning the limit pair (lambda*, z*) plus complementarity
// diagnostics. The residual r* = A z* - lambda* B z* need not vanish at
// a solution; convergence is judged on the eigenvalue and iterate
// increments.

#include <functional>
#include <vector>

#include "varstab/pencil.hpp"
#include "varstab/types.hpp"

namespace varstab::stability {

/// Matrix-free symmetric operator (used by the large-scale benchmark
/// paths; the dense overload wraps a SymmetricPencil into two of these).
struct LinearOperator {
  Index dim = 0;
  std::function<Vector(const Vector&)> apply;
};

struct ConeParams {
  Real step_scale = 0.0;  // <= 0: automatic 1 / lambda_max(A)
  int max_iter = 200000;
  Real tol_lambda = 1e-9;
  Real tol_x = 1e-8;

  enum class Init { uniform_positive, given };
  Init init = Init::uniform_positive;
  Vector initial_guess;  // consumed when init == given
  unsigned seed = 24601;

  bool record_history = true;
  Index history_stride = 1;

  void validate() const;
};

struct ConeIterate {
  int iter = 0;
  Real lambda = 0.0;
  Real x_error = 0.0;        // ||z_k - z_{k-1}||
  Real residual_norm = 0.0;  // ||A z_k - lambda_k B z_k||
};

struct ConeResult {
  Real lambda_star = 0.0;
  Vector z_star;
  bool converged = false;
  bool degenerate = false;  // projection annihilated the B-norm
  int iterations = 0;
  std::vector<ConeIterate> history;

  Real complementarity = 0.0;              // <r*, z*>
  Real dual_feasibility_violation = 0.0;   // max(0, -min r*_i on zero dofs)
  Real residual_norm = 0.0;                // ||r*||
  Real step_scale_used = 0.0;
};

/// Kinematic block passes through, order-parameter block is clipped at
/// zero from below, pinned dofs are reset to zero. Idempotent.
Vector project_cone(const Vector& y, const BlockLayout& layout);

ConeResult solve_cone_eigen(const SymmetricPencil& pencil,
                            const BlockLayout& layout,
                            const ConeParams& params);

ConeResult solve_cone_eigen(const LinearOperator& A, const LinearOperator& B,
                            const BlockLayout& layout,
                            const ConeParams& params);

}  // namespace varstab::stability
