#include "varstab/hybrid.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace varstab::hybrid {

namespace {

constexpr Real kBoundTol = 1e-12;

bool at_lower(Real z, Real lb) {
  return std::isfinite(lb) && z - lb <= kBoundTol * std::max(Real(1), std::abs(lb));
}

bool at_upper(Real z, Real ub) {
  return std::isfinite(ub) && ub - z <= kBoundTol * std::max(Real(1), std::abs(ub));
}

Vector clamp_to(const models::Bounds& bounds, Vector z) {
  return z.cwiseMax(bounds.lower).cwiseMin(bounds.upper);
}

// Solve H x = b for symmetric positive definite H; SolverError otherwise.
Vector spd_solve(const Matrix& H, const Vector& b, const char* who) {
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success)
    throw SolverError(std::string(who) + ": singular block operator");
  return llt.solve(b);
}

// One alternate-minimization sweep: exact kinematic solve, then the
// bound-constrained quadratic subproblem on the order-parameter block.
// Returns the order-parameter increment norm.
Real am_sweep(const models::EnergyModel& model, Vector& z,
              const models::Bounds& bounds) {
  const BlockLayout layout = model.layout();
  const Index nf = layout.first_dim, ns = layout.second_dim;

  if (nf > 0) {
    const Vector g = model.gradient(z);
    const Matrix H = model.hessian(z);
    const Vector d = spd_solve(H.topLeftCorner(nf, nf), -g.head(nf),
                               "alternate_minimization");
    z.head(nf) += d;
  }

  const Vector g = model.gradient(z);
  const Matrix H = model.hessian(z);
  const Matrix Hss = H.bottomRightCorner(ns, ns);
  // Linear term of the subproblem in the new order-parameter values x:
  // grad_alpha E(u, x) = Hss x + (g_s - Hss z_s).
  const Vector g0 = g.tail(ns) - Hss * z.tail(ns);
  const Vector x = solve_bound_qp(Hss, g0, bounds.lower.tail(ns),
                                  bounds.upper.tail(ns), z.tail(ns));
  const Real dalpha = (x - z.tail(ns)).norm();
  z.tail(ns) = x;
  return dalpha;
}

}  // namespace

void HybridParams::validate() const {
  require(max_it_amin >= 1 && max_it_newton >= 1,
          "HybridParams: iteration caps must be >= 1");
  require(tol_residual > 0 && tol_alpha_increment > 0 && switch_threshold > 0,
          "HybridParams: tolerances must be positive");
}

ConstrainedResidual constrained_residual(const models::EnergyModel& model,
                                         const Vector& z,
                                         const models::Bounds& bounds) {
  require(z.size() == model.dim(), "constrained_residual: dimension mismatch");
  if (!bounds.contains(z, 1e-12))
    throw InvalidState("constrained_residual: state violates bounds");

  const Vector g = model.gradient(z);
  ConstrainedResidual out;
  out.value.resize(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    if (at_lower(z[i], bounds.lower[i]))
      out.value[i] = std::min(g[i], 0.0);
    else if (at_upper(z[i], bounds.upper[i]))
      out.value[i] = std::max(g[i], 0.0);
    else
      out.value[i] = g[i];
  }
  out.norm = out.value.norm();
  return out;
}

Vector solve_bound_qp(const Matrix& H, const Vector& g0, const Vector& lower,
                      const Vector& upper, const Vector& x0) {
  const Index n = H.rows();
  require(H.cols() == n && g0.size() == n && lower.size() == n &&
              upper.size() == n && x0.size() == n,
          "solve_bound_qp: dimension mismatch");

  Vector x = x0.cwiseMax(lower).cwiseMin(upper);
  // -1: at lower, +1: at upper, 0: free
  std::vector<int> side(n, 0);
  for (Index i = 0; i < n; ++i) {
    if (at_lower(x[i], lower[i])) side[i] = -1;
    else if (at_upper(x[i], upper[i])) side[i] = +1;
  }

  const int soft_cap = static_cast<int>(3 * n + 10);
  const int hard_cap = static_cast<int>(30 * n + 50);
  const Real dual_tol = 0.0;  // exact sign test; solves are direct

  for (int it = 0; it < hard_cap; ++it) {
    std::vector<Index> free;
    for (Index i = 0; i < n; ++i) {
      if (side[i] == -1) x[i] = lower[i];
      else if (side[i] == +1) x[i] = upper[i];
      else free.push_back(i);
    }

    if (!free.empty()) {
      const Index m = static_cast<Index>(free.size());
      Matrix Hff(m, m);
      Vector rhs(m);
      for (Index r = 0; r < m; ++r) {
        rhs[r] = -g0[free[r]];
        for (Index s = 0; s < m; ++s) Hff(r, s) = H(free[r], free[s]);
        for (Index j = 0; j < n; ++j)
          if (side[j] != 0) rhs[r] -= H(free[r], j) * x[j];
      }
      const Vector xf = spd_solve(Hff, rhs, "solve_bound_qp");

      // Clip infeasible free dofs onto their bounds and mark them active.
      bool clipped = false;
      for (Index r = 0; r < m; ++r) {
        const Index i = free[r];
        if (xf[r] < lower[i]) {
          x[i] = lower[i];
          side[i] = -1;
          clipped = true;
        } else if (xf[r] > upper[i]) {
          x[i] = upper[i];
          side[i] = +1;
          clipped = true;
        } else {
          x[i] = xf[r];
        }
      }
      if (clipped) continue;
    }

    // Dual check on the active set; release violators.
    const Vector g = H * x + g0;
    Index worst = -1;
    Real worst_viol = dual_tol;
    bool released = false;
    for (Index i = 0; i < n; ++i) {
      Real viol = 0.0;
      if (side[i] == -1) viol = -g[i];
      else if (side[i] == +1) viol = g[i];
      if (viol > dual_tol) {
        if (it < soft_cap) {
          side[i] = 0;
          released = true;
        } else if (viol > worst_viol) {
          worst = i;  // anti-cycling: single worst release past the soft cap
          worst_viol = viol;
        }
      }
    }
    if (it >= soft_cap && worst >= 0) {
      side[worst] = 0;
      released = true;
    }
    if (!released) return x;
  }
  throw SolverError("solve_bound_qp: active-set iteration did not settle");
}

SolveReport alternate_minimization(const models::EnergyModel& model,
                                   const Vector& z0,
                                   const models::Bounds& bounds,
                                   const HybridParams& params) {
  params.validate();
  bounds.validate(model.layout());

  SolveReport report;
  Vector z = z0;
  ConstrainedResidual cr = constrained_residual(model, z, bounds);
  const Real stop_level =
      std::max(params.switch_threshold * cr.norm, params.tol_residual);
  report.residual_history.push_back(cr.norm);
  report.energy_history.push_back(model.energy(z));

  while (cr.norm > stop_level &&
         report.iterations_phase1 < params.max_it_amin) {
    const Real dalpha = am_sweep(model, z, bounds);
    ++report.iterations_phase1;
    cr = constrained_residual(model, z, bounds);
    report.residual_history.push_back(cr.norm);
    report.energy_history.push_back(model.energy(z));
    if (dalpha <= params.tol_alpha_increment) break;
  }

  report.converged = cr.norm <= params.tol_residual;
  report.final_state = std::move(z);
  return report;
}

SolveReport solve_equilibrium(const models::EnergyModel& model,
                              const Vector& z0, const models::Bounds& bounds,
                              const HybridParams& params) {
  SolveReport report = alternate_minimization(model, z0, bounds, params);
  if (report.converged) return report;

  report.switch_index = report.iterations_phase1;
  Vector z = report.final_state;
  const BlockLayout layout = model.layout();

  while (report.iterations_phase2 < params.max_it_newton) {
    ConstrainedResidual cr = constrained_residual(model, z, bounds);
    if (cr.norm <= params.tol_residual) {
      report.converged = true;
      break;
    }
    ++report.iterations_phase2;

    const Vector g = model.gradient(z);
    const Matrix H = model.hessian(z);

    // Reduced space: dofs held at a bound with correctly-signed gradient.
    std::vector<Index> free;
    for (Index i = 0; i < layout.dim(); ++i) {
      const bool lo = at_lower(z[i], bounds.lower[i]) && g[i] >= 0.0;
      const bool up = at_upper(z[i], bounds.upper[i]) && g[i] <= 0.0;
      if (!lo && !up) free.push_back(i);
    }

    bool fall_back = free.empty();
    Vector step = Vector::Zero(layout.dim());
    if (!fall_back) {
      const Index m = static_cast<Index>(free.size());
      Matrix Hff(m, m);
      Vector gf(m);
      for (Index r = 0; r < m; ++r) {
        gf[r] = g[free[r]];
        for (Index s = 0; s < m; ++s) Hff(r, s) = H(free[r], free[s]);
      }
      Eigen::LDLT<Matrix> ldlt(Hff);
      if (ldlt.info() != Eigen::Success ||
          ldlt.vectorD().minCoeff() <= 0.0) {
        fall_back = true;  // indefinite reduced Hessian
      } else {
        const Vector pf = ldlt.solve(-gf);
        for (Index r = 0; r < m; ++r) step[free[r]] = pf[r];
      }
    }

    if (!fall_back) {
      // Projected backtracking on the energy.
      const Real e0 = model.energy(z);
      Real t = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
        const Vector trial = clamp_to(bounds, z + t * step);
        const Real pred = g.dot(trial - z);
        if (pred > 0.0) continue;  // projection reversed the direction
        if (model.energy(trial) <= e0 + 1e-4 * pred) {
          z = trial;
          accepted = true;
          break;
        }
      }
      fall_back = !accepted;
    }

    if (fall_back) am_sweep(model, z, bounds);

    cr = constrained_residual(model, z, bounds);
    report.residual_history.push_back(cr.norm);
    report.energy_history.push_back(model.energy(z));
    if (cr.norm <= params.tol_residual) {
      report.converged = true;
      break;
    }
  }

  report.final_state = std::move(z);
  return report;
}

}  // namespace varstab::hybrid
