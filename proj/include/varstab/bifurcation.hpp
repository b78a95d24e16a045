#pragma once

// Lower spectrum of a symmetric pencil restricted to the subspace of
// inactive constraints. Singular B (zero kinematic block) is eliminated
// by an explicit Schur complement; the reduced definite pencil is solved
// densely at small size and by shift-invert subspace iteration above
// the dense threshold.

#include <optional>
#include <vector>

#include "varstab/models.hpp"
#include "varstab/pencil.hpp"
#include "varstab/types.hpp"

namespace varstab::bifurcation {

struct Spectrum {
  std::vector<Real> eigenvalues;  // ascending, k smallest finite ones
  Matrix eigenvectors;            // full-dim columns, zero on non-inactive dofs
  bool is_positive_definite = false;
  bool k_clamped = false;  // requested k exceeded the reduced dimension
  Real tol_pd_used = 0.0;
};

struct BifurcationOptions {
  Index dense_threshold = 400;   // reduced dim above this uses iteration
  Real residual_rel_tol = 1e-11;
  int max_iterations = 500;
  unsigned seed = 7771;
};

/// Dofs strictly between their bounds (by tol_active), excluding pinned
/// dofs. Kinematic-block dofs carry no bounds and are always inactive
/// constraints (i.e. members of the returned set).
std::vector<Index> inactive_set(const Vector& z, const models::Bounds& bounds,
                                const BlockLayout& layout,
                                Real tol_active = 1e-8);

/// k smallest finite eigenvalues of the pencil restricted to `inactive`.
/// Eigenvectors are extended by zero on all other dofs and B-orthonormal
/// where B is definite on the reduced space. tol_pd defaults to
/// 1e-10 * max|A_r|; is_positive_definite = (smallest eigenvalue > tol_pd).
Spectrum solve_bifurcation(const SymmetricPencil& pencil,
                           const std::vector<Index>& inactive, int k,
                           std::optional<Real> tol_pd = std::nullopt,
                           const BifurcationOptions& options = {});

}  // namespace varstab::bifurcation
