#include "varstab/stability.hpp"

#include <cmath>
#include <random>

namespace varstab::stability {

namespace {

// Spectral-radius estimate by power iteration; sets the default step.
template <class ApplyA>
Real estimate_lambda_max(Index dim, const ApplyA& A, unsigned seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<Real> dist;
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = dist(rng);
  v.normalize();
  Real lam = 1.0;
  for (int it = 0; it < 50; ++it) {
    Vector w = A(v);
    const Real nrm = w.norm();
    if (nrm <= 0) break;
    lam = v.dot(w);
    v = w / nrm;
  }
  return std::max(std::abs(lam), Real(1e-300));
}

template <class ApplyA, class ApplyB>
ConeResult spa_iterate(Index dim, const ApplyA& A, const ApplyB& B,
                       const BlockLayout& layout, const ConeParams& params) {
  params.validate();
  require(layout.dim() == dim, "solve_cone_eigen: layout/operator mismatch");

  ConeResult result;
  result.step_scale_used = params.step_scale > 0
                               ? params.step_scale
                               : 1.0 / estimate_lambda_max(dim, A, params.seed);
  const Real s = result.step_scale_used;

  Vector z;
  if (params.init == ConeParams::Init::given) {
    require(params.initial_guess.size() == dim,
            "solve_cone_eigen: initial guess dimension mismatch");
    z = params.initial_guess;
  } else {
    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<Real> dist(0.1, 1.0);
    z = Vector::Zero(dim);
    for (Index i = layout.first_dim; i < dim; ++i) z[i] = dist(rng);
  }

  z = project_cone(z, layout);
  const Real nb0 = std::sqrt(std::max(z.dot(B(z)), Real(0)));
  if (nb0 <= 0)
    throw SolverError("solve_cone_eigen: initial guess has zero B-norm");
  z /= nb0;

  Real lam_prev = std::numeric_limits<Real>::quiet_NaN();
  Real dx_prev = std::numeric_limits<Real>::quiet_NaN();
  int k = 0;
  for (; k < params.max_iter; ++k) {
    const Vector Az = A(z);
    const Vector Bz = B(z);
    const Real lam = z.dot(Az) / z.dot(Bz);
    if (!std::isfinite(lam)) break;  // diverged step scale
    const Vector r = Az - lam * Bz;

    if (params.record_history && (k % params.history_stride == 0))
      result.history.push_back({k, lam, dx_prev, r.norm()});

    if (k >= 1 && std::abs(lam - lam_prev) <= params.tol_lambda &&
        dx_prev <= params.tol_x) {
      result.converged = true;
      break;
    }

    Vector zp = project_cone(z - s * r, layout);
    const Real nb2 = zp.dot(B(zp));
    if (nb2 <= 1e-300) {
      result.degenerate = true;  // report the last valid pair
      break;
    }
    zp /= std::sqrt(nb2);
    dx_prev = (zp - z).norm();
    lam_prev = lam;
    z = std::move(zp);
  }

  result.iterations = k;
  result.z_star = z;

  const Vector Az = A(z);
  const Vector Bz = B(z);
  result.lambda_star = z.dot(Az) / z.dot(Bz);
  const Vector r = Az - result.lambda_star * Bz;
  result.residual_norm = r.norm();
  result.complementarity = r.dot(z);

  // Dual feasibility on the clipped order-parameter dofs.
  const Real zscale = z.cwiseAbs().maxCoeff();
  Real worst = 0.0;
  for (Index i = layout.first_dim; i < dim; ++i)
    if (z[i] <= 1e-14 * zscale) worst = std::min(worst, r[i]);
  result.dual_feasibility_violation = worst < 0.0 ? -worst : 0.0;
  return result;
}

}  // namespace

void ConeParams::validate() const {
  require(max_iter >= 1, "ConeParams: max_iter must be >= 1");
  require(tol_lambda > 0 && tol_x > 0, "ConeParams: tolerances must be positive");
  require(history_stride >= 1, "ConeParams: history_stride must be >= 1");
}

Vector project_cone(const Vector& y, const BlockLayout& layout) {
  require(y.size() == layout.dim(), "project_cone: dimension mismatch");
  Vector out = y;
  for (Index i = layout.first_dim; i < y.size(); ++i)
    out[i] = std::max(out[i], 0.0);
  for (Index i : layout.zero_dofs) out[i] = 0.0;
  return out;
}

ConeResult solve_cone_eigen(const SymmetricPencil& pencil,
                            const BlockLayout& layout,
                            const ConeParams& params) {
  validate_pencil(pencil);
  return spa_iterate(
      pencil.dim(), [&](const Vector& x) -> Vector { return pencil.A * x; },
      [&](const Vector& x) -> Vector { return pencil.B * x; }, layout, params);
}

ConeResult solve_cone_eigen(const LinearOperator& A, const LinearOperator& B,
                            const BlockLayout& layout,
                            const ConeParams& params) {
  require(A.dim == B.dim, "solve_cone_eigen: operator dimensions differ");
  return spa_iterate(A.dim, [&](const Vector& x) { return A.apply(x); },
                     [&](const Vector& x) { return B.apply(x); }, layout,
                     params);
}

}  // namespace varstab::stability
