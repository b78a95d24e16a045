#pragma once

// Minimal 1D P1 finite-element core on the unit interval: uniform mesh,
// closed-form element assembly of the stiffness, mass and mixed forms,
// and symmetric Dirichlet elimination.

#include <memory>
#include <vector>

#include "varstab/types.hpp"

namespace varstab::fem1d {

/// Uniform partition of [0,1] into n_cells intervals.
struct IntervalMesh {
  Index n_cells = 0;
  Vector nodes;   // n_cells + 1 coordinates, strictly increasing
  Real h = 0.0;   // cell length, 1 / n_cells

  Index n_nodes() const { return n_cells + 1; }
};

/// Nodal P1 field. The mesh handle may be null for purely algebraic
/// vectors (states of mesh-free models); when present, values.size()
/// must equal the node count.
struct ScalarField {
  std::shared_ptr<const IntervalMesh> mesh;
  Vector values;

  Index dim() const { return values.size(); }
};

/// Two-block state z = (v, beta) (or (u, alpha)); both fields live on the
/// same mesh when meshes are attached.
struct BlockState {
  ScalarField first;
  ScalarField second;

  Index dim() const { return first.dim() + second.dim(); }
  Vector stacked() const;
};

BlockState make_block_state(std::shared_ptr<const IntervalMesh> mesh,
                            Vector first, Vector second);

/// Algebraic (mesh-free) two-block state from stacked dof values.
BlockState split_state(const Vector& stacked, const BlockLayout& layout);

/// Dirichlet constraint on one block of a BlockState.
struct DirichletBC {
  enum class Block { first, second };
  Block block = Block::first;
  std::vector<Index> dofs;
  Vector values;
};

/// The three assembled P1 forms on the full node set:
///   K_ij = \int phi_i' phi_j'   (stiffness)
///   M_ij = \int phi_i  phi_j    (mass)
///   G_ij = \int phi_i' phi_j    (mixed, h-independent)
struct FemForms {
  Matrix K;
  Matrix M;
  Matrix G;
};

/// Reduced operator/rhs pair after symmetric Dirichlet elimination,
/// together with the bookkeeping needed to extend a reduced solution.
struct ReducedSystem {
  Matrix op;
  Vector rhs;
  std::vector<Index> kept;        // retained dof indices, ascending
  std::vector<Index> eliminated;  // constrained dof indices, ascending
  Vector prescribed;              // values at eliminated dofs
};

IntervalMesh build_mesh(Index n_cells);

FemForms assemble_forms(const IntervalMesh& mesh);

/// Symmetric elimination: constrained rows/columns are removed and the
/// right-hand side picks up -op(:,c) * value for each constrained dof c.
/// Extending the reduced solution by the prescribed values reproduces the
/// constrained solution of the full system.
ReducedSystem apply_dirichlet(const Matrix& op, const Vector& rhs,
                              const std::vector<Index>& dofs,
                              const Vector& values);

/// Scatter a reduced solution back to full length, inserting the
/// prescribed values at the eliminated dofs.
Vector extend_by_values(const Vector& reduced, const ReducedSystem& sys);

/// Nodal linear interpolation of a P1 field onto another uniform mesh.
Vector interpolate_nodal(const IntervalMesh& from, const Vector& values,
                         const IntervalMesh& to);

}  // namespace varstab::fem1d
