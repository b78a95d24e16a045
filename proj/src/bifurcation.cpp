#include "varstab/bifurcation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace varstab::bifurcation {

namespace {

Matrix restrict_to(const Matrix& m, const std::vector<Index>& idx) {
  const Index n = static_cast<Index>(idx.size());
  Matrix out(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index s = 0; s < n; ++s) out(r, s) = m(idx[r], idx[s]);
  return out;
}

// Deterministic sign: largest-magnitude entry positive.
void fix_sign(Eigen::Ref<Vector> x) {
  Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  if (x[imax] < 0) x = -x;
}

struct ReducedSolve {
  std::vector<Real> eigenvalues;
  Matrix eigenvectors;  // columns, B-orthonormal
};

ReducedSolve dense_solve(const Matrix& S, const Matrix& B, Index k) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(S, B);
  if (es.info() != Eigen::Success)
    throw SolverError("solve_bifurcation: dense eigensolve failed");
  ReducedSolve out;
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
  out.eigenvectors = es.eigenvectors().leftCols(k);
  return out;
}

// B-orthonormalize the columns of X (modified Gram-Schmidt, two passes).
void b_orthonormalize(Matrix& X, const Matrix& B) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Index j = 0; j < X.cols(); ++j) {
      Vector Bxj = B * X.col(j);
      for (Index i = 0; i < j; ++i)
        X.col(j) -= X.col(i).dot(Bxj) * X.col(i);
      Bxj = B * X.col(j);
      const Real nrm = std::sqrt(std::max(X.col(j).dot(Bxj), Real(0)));
      if (nrm <= 0)
        throw SolverError("solve_bifurcation: B-degenerate subspace");
      X.col(j) /= nrm;
    }
  }
}

// Shift-invert subspace iteration for the k smallest eigenvalues of the
// definite pencil (S, B). A successful LLT of S - sigma*B certifies
// sigma < lambda_min, so the eigenvalues nearest sigma are the smallest.
std::optional<ReducedSolve> shift_invert_solve(
    const Matrix& S, const Matrix& B, Index k,
    const BifurcationOptions& options) {
  const Index n = S.rows();
  const Real scale =
      std::max(S.cwiseAbs().maxCoeff(), Real(1e-300));

  Real sigma = 0.0;
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) {
    Real mag = 1e-10 * scale;
    bool ok = false;
    for (int attempt = 0; attempt < 40 && !ok; ++attempt, mag *= 4.0) {
      sigma = -mag;
      llt.compute(S - sigma * B);
      ok = llt.info() == Eigen::Success;
    }
    if (!ok) return std::nullopt;
  }

  const Index m = std::min(n, k + 4);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<Real> dist;
  Matrix X(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = dist(rng);

  ReducedSolve out;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Matrix BX = B * X;
    X = llt.solve(BX);
    b_orthonormalize(X, B);

    // Rayleigh-Ritz on the current subspace.
    const Matrix Sx = X.transpose() * (S * X);
    const Matrix Sh = 0.5 * (Sx + Sx.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> small(Sh);
    X = X * small.eigenvectors();

    bool converged = true;
    for (Index j = 0; j < k && converged; ++j) {
      const Real lam = small.eigenvalues()[j];
      const Real res = (S * X.col(j) - lam * (B * X.col(j))).norm();
      converged = res <= options.residual_rel_tol * scale * X.col(j).norm();
    }
    if (converged) {
      out.eigenvalues.assign(small.eigenvalues().data(),
                             small.eigenvalues().data() + k);
      out.eigenvectors = X.leftCols(k);
      return out;
    }
  }
  return std::nullopt;  // caller falls back to the dense path
}

}  // namespace

std::vector<Index> inactive_set(const Vector& z, const models::Bounds& bounds,
                                const BlockLayout& layout, Real tol_active) {
  require(z.size() == layout.dim(), "inactive_set: dimension mismatch");
  bounds.validate(layout);
  require(tol_active > 0, "inactive_set: tol_active must be positive");
  if (!bounds.contains(z, 1e-12))
    throw InvalidState("inactive_set: state violates bounds");

  std::set<Index> pinned(layout.zero_dofs.begin(), layout.zero_dofs.end());
  std::vector<Index> out;
  for (Index i = 0; i < layout.dim(); ++i) {
    if (pinned.count(i)) continue;
    if (!layout.is_second(i)) {
      out.push_back(i);  // kinematic dofs carry no bounds
      continue;
    }
    if (z[i] > bounds.lower[i] + tol_active &&
        z[i] < bounds.upper[i] - tol_active)
      out.push_back(i);
  }
  return out;
}

Spectrum solve_bifurcation(const SymmetricPencil& pencil,
                           const std::vector<Index>& inactive, int k,
                           std::optional<Real> tol_pd,
                           const BifurcationOptions& options) {
  validate_pencil(pencil);
  require(k >= 1, "solve_bifurcation: k must be >= 1");
  require(!inactive.empty(), "solve_bifurcation: inactive set is empty");
  std::vector<Index> idx = inactive;
  std::sort(idx.begin(), idx.end());
  require(std::adjacent_find(idx.begin(), idx.end()) == idx.end(),
          "solve_bifurcation: duplicate inactive dof");
  require(idx.front() >= 0 && idx.back() < pencil.dim(),
          "solve_bifurcation: inactive dof out of range");

  const Matrix A_r = restrict_to(pencil.A, idx);
  const Matrix B_r = restrict_to(pencil.B, idx);
  const Index nr = A_r.rows();

  Spectrum spec;
  spec.tol_pd_used = tol_pd.value_or(1e-10 * A_r.cwiseAbs().maxCoeff());

  // Split off the kernel block of B_r (identically zero rows).
  const Real b_scale = B_r.cwiseAbs().maxCoeff();
  if (b_scale <= 0)
    throw SolverError("solve_bifurcation: B vanishes on the inactive set");
  std::vector<Index> kernel, range;
  for (Index i = 0; i < nr; ++i) {
    if (B_r.row(i).cwiseAbs().maxCoeff() <= 1e-14 * b_scale)
      kernel.push_back(i);
    else
      range.push_back(i);
  }

  Matrix S, Bmm, W;
  if (kernel.empty()) {
    S = A_r;
    Bmm = B_r;
  } else {
    const Index nk = static_cast<Index>(kernel.size());
    const Index nm = static_cast<Index>(range.size());
    Matrix Akk(nk, nk), Akm(nk, nm);
    for (Index r = 0; r < nk; ++r) {
      for (Index s = 0; s < nk; ++s) Akk(r, s) = A_r(kernel[r], kernel[s]);
      for (Index s = 0; s < nm; ++s) Akm(r, s) = A_r(kernel[r], range[s]);
    }
    Eigen::LLT<Matrix> llt(Akk);
    if (llt.info() != Eigen::Success)
      throw SolverError(
          "solve_bifurcation: kinematic block singular on the kernel of B");
    W = llt.solve(Akm);

    Matrix Amm(nm, nm);
    Bmm.resize(nm, nm);
    for (Index r = 0; r < nm; ++r)
      for (Index s = 0; s < nm; ++s) {
        Amm(r, s) = A_r(range[r], range[s]);
        Bmm(r, s) = B_r(range[r], range[s]);
      }
    const Matrix schur = Amm - Akm.transpose() * W;
    S = 0.5 * (schur + schur.transpose());
  }

  const Index nfinite = S.rows();
  Index kk = k;
  if (kk > nfinite) {
    kk = nfinite;
    spec.k_clamped = true;
  }

  ReducedSolve sol;
  if (nfinite <= options.dense_threshold) {
    sol = dense_solve(S, Bmm, kk);
  } else {
    auto iter = shift_invert_solve(S, Bmm, kk, options);
    sol = iter ? std::move(*iter) : dense_solve(S, Bmm, kk);
  }

  spec.eigenvalues = sol.eigenvalues;
  spec.is_positive_definite = spec.eigenvalues.front() > spec.tol_pd_used;

  // Extend eigenvectors by zero on active/constrained dofs; recover the
  // kernel-block components for Schur-reduced problems.
  spec.eigenvectors = Matrix::Zero(pencil.dim(), kk);
  for (Index j = 0; j < kk; ++j) {
    Vector xr = Vector::Zero(nr);
    if (kernel.empty()) {
      xr = sol.eigenvectors.col(j);
    } else {
      const Vector xk = -W * sol.eigenvectors.col(j);
      for (std::size_t r = 0; r < range.size(); ++r)
        xr[range[r]] = sol.eigenvectors.col(j)[static_cast<Index>(r)];
      for (std::size_t r = 0; r < kernel.size(); ++r)
        xr[kernel[r]] = xk[static_cast<Index>(r)];
    }
    fix_sign(xr);
    for (Index r = 0; r < nr; ++r) spec.eigenvectors(idx[r], j) = xr[r];
  }
  return spec;
}

}  // namespace varstab::bifurcation
