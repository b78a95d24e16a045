#pragma once

// Energy-model abstraction shared by the solvers (value, gradient,
// Hessian on stacked two-block states) plus the three concrete models:
// the Rayleigh benchmark pencil, a bound-constrained quadratic obstacle
// model, and a two-block coupled quadratic model.

#include <memory>
#include <vector>

#include "varstab/fem1d.hpp"
#include "varstab/pencil.hpp"
#include "varstab/types.hpp"

namespace varstab::models {

/// Per-dof bounds on a stacked state. Kinematic-block entries must be
/// unbounded; only the order parameter carries constraints
/// (irreversibility enters as lower = previous order parameter).
struct Bounds {
  Vector lower;
  Vector upper;

  static Bounds unbounded(Index dim);
  void validate(const BlockLayout& layout) const;
  bool contains(const Vector& z, Real tol = 0.0) const;
};

/// Twice-differentiable energy on stacked states. Gradients and Hessians
/// are exact variations of energy(); the finite-difference consistency
/// suite holds every implementation to that contract.
class EnergyModel {
 public:
  virtual ~EnergyModel() = default;

  virtual BlockLayout layout() const = 0;
  virtual Real energy(const Vector& z) const = 0;
  virtual Vector gradient(const Vector& z) const = 0;
  virtual Matrix hessian(const Vector& z) const = 0;

  Index dim() const { return layout().dim(); }
};

struct Evaluation {
  Real energy = 0.0;
  Vector gradient;
  Matrix hessian;
};

/// Evaluate all three contract quantities with dimension checking.
Evaluation evaluate(const EnergyModel& model, const Vector& z);

/// E(z) = 1/2 z^T A z - f^T z with a lower bound on every dof; the whole
/// state is the order-parameter block (no kinematic block).
class ObstacleQuadraticModel : public EnergyModel {
 public:
  ObstacleQuadraticModel(Matrix A, Vector f, Vector lower);

  BlockLayout layout() const override;
  Real energy(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;

  Bounds bounds() const;
  const Matrix& operator_matrix() const { return A_; }
  const Vector& load() const { return f_; }

 private:
  Matrix A_;
  Vector f_;
  Vector lower_;
};

/// Two-block quadratic energy
///   E(u, alpha) = 1/2 u^T A_u u + 1/2 alpha^T A_a alpha
///               + gamma u^T C alpha - f_u^T u - f_a^T alpha
/// with bounds on alpha only. A_u and A_a must be SPD; the full Hessian
/// may be indefinite for large |gamma|.
class CoupledQuadraticModel : public EnergyModel {
 public:
  CoupledQuadraticModel(Matrix A_u, Matrix A_alpha, Matrix C, Real gamma,
                        Vector f_u, Vector f_alpha, Vector alpha_lower);

  BlockLayout layout() const override;
  Real energy(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;

  Bounds bounds() const;

 private:
  Matrix H_;  // full block Hessian
  Vector f_;  // stacked loads
  Vector alpha_lower_;
  Index nu_ = 0, na_ = 0;
};

/// Coefficients of the benchmark Rayleigh ratio
///   R(v, beta) = [a \int beta'^2 + b \int (v' - c beta)^2] / \int beta^2
/// on (0,1) with v(0) = v(1) = 0 and beta free at the boundary.
struct RayleighQuotientModel {
  Real a = 1.0;
  Real b = 1.0;
  Real c = 1.0;

  void validate() const;
};

/// Rayleigh pencil on the reduced dof set [v interior; beta all nodes]:
/// A is the numerator form, B the denominator form (zero v-block).
struct RayleighSystem {
  SymmetricPencil pencil;
  BlockLayout layout;
  fem1d::ReducedSystem v_reduction;  // Dirichlet elimination of the v block
};

/// Assemble the benchmark pencil. `bcs` must clamp the first block at the
/// two boundary nodes to zero and leave the second block unconstrained.
RayleighSystem rayleigh_pencil(const RayleighQuotientModel& model,
                               const fem1d::IntervalMesh& mesh,
                               const std::vector<fem1d::DirichletBC>& bcs);

/// Quadratic-form energy 1/2 z^T A z of the pencil numerator, exposed as
/// an EnergyModel so the derivative-consistency suite covers the
/// benchmark model on the same footing as the other two.
class RayleighFormModel : public EnergyModel {
 public:
  RayleighFormModel(const RayleighQuotientModel& model,
                    const fem1d::IntervalMesh& mesh);

  BlockLayout layout() const override;
  Real energy(const Vector& z) const override;
  Vector gradient(const Vector& z) const override;
  Matrix hessian(const Vector& z) const override;

 private:
  RayleighSystem system_;
};

}  // namespace varstab::models
