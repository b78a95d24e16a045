#include "varstab/models.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>

namespace varstab {

void validate_pencil(const SymmetricPencil& pencil, int psd_samples,
                     unsigned seed) {
  require(pencil.A.rows() == pencil.A.cols() &&
              pencil.B.rows() == pencil.B.cols(),
          "pencil: operators must be square");
  require(pencil.A.rows() == pencil.B.rows(),
          "pencil: A and B dimensions differ");
  require(is_symmetric(pencil.A), "pencil: A not symmetric");
  require(is_symmetric(pencil.B), "pencil: B not symmetric");
  if (psd_samples > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<Real> dist;
    const Real scale = std::max(pencil.B.cwiseAbs().maxCoeff(), Real(1));
    for (int s = 0; s < psd_samples; ++s) {
      Vector x(pencil.dim());
      for (Index i = 0; i < x.size(); ++i) x[i] = dist(rng);
      require(x.dot(pencil.B * x) >= -1e-12 * scale * x.squaredNorm(),
              "pencil: B not positive semidefinite");
    }
  }
}

}  // namespace varstab

namespace varstab::models {

namespace {

void require_spd(const Matrix& m, const char* name) {
  require(is_symmetric(m), std::string(name) + ": not symmetric");
  Eigen::LLT<Matrix> llt(m);
  require(llt.info() == Eigen::Success,
          std::string(name) + ": not positive definite");
}

}  // namespace

Bounds Bounds::unbounded(Index dim) {
  Bounds b;
  b.lower = Vector::Constant(dim, -kInf);
  b.upper = Vector::Constant(dim, kInf);
  return b;
}

void Bounds::validate(const BlockLayout& layout) const {
  require(lower.size() == layout.dim() && upper.size() == layout.dim(),
          "Bounds: dimension mismatch");
  require((lower.array() <= upper.array()).all(),
          "Bounds: lower exceeds upper");
  for (Index i = 0; i < layout.first_dim; ++i)
    require(lower[i] == -kInf && upper[i] == kInf,
            "Bounds: kinematic block must be unbounded");
}

bool Bounds::contains(const Vector& z, Real tol) const {
  return (z.array() >= lower.array() - tol).all() &&
         (z.array() <= upper.array() + tol).all();
}

Evaluation evaluate(const EnergyModel& model, const Vector& z) {
  require(z.size() == model.dim(), "evaluate: state dimension mismatch");
  Evaluation out;
  out.energy = model.energy(z);
  out.gradient = model.gradient(z);
  out.hessian = model.hessian(z);
  return out;
}

ObstacleQuadraticModel::ObstacleQuadraticModel(Matrix A, Vector f,
                                               Vector lower)
    : A_(std::move(A)), f_(std::move(f)), lower_(std::move(lower)) {
  require_spd(A_, "ObstacleQuadraticModel");
  require(f_.size() == A_.rows() && lower_.size() == A_.rows(),
          "ObstacleQuadraticModel: dimension mismatch");
}

BlockLayout ObstacleQuadraticModel::layout() const {
  return BlockLayout{0, A_.rows(), {}};
}

Real ObstacleQuadraticModel::energy(const Vector& z) const {
  return 0.5 * z.dot(A_ * z) - f_.dot(z);
}

Vector ObstacleQuadraticModel::gradient(const Vector& z) const {
  return A_ * z - f_;
}

Matrix ObstacleQuadraticModel::hessian(const Vector&) const { return A_; }

Bounds ObstacleQuadraticModel::bounds() const {
  Bounds b;
  b.lower = lower_;
  b.upper = Vector::Constant(A_.rows(), kInf);
  return b;
}

CoupledQuadraticModel::CoupledQuadraticModel(Matrix A_u, Matrix A_alpha,
                                             Matrix C, Real gamma,
                                             Vector f_u, Vector f_alpha,
                                             Vector alpha_lower)
    : alpha_lower_(std::move(alpha_lower)) {
  require_spd(A_u, "CoupledQuadraticModel: A_u");
  require_spd(A_alpha, "CoupledQuadraticModel: A_alpha");
  nu_ = A_u.rows();
  na_ = A_alpha.rows();
  require(C.rows() == nu_ && C.cols() == na_,
          "CoupledQuadraticModel: coupling shape mismatch");
  require(f_u.size() == nu_ && f_alpha.size() == na_ &&
              alpha_lower_.size() == na_,
          "CoupledQuadraticModel: load/bound dimension mismatch");

  H_.resize(nu_ + na_, nu_ + na_);
  H_.topLeftCorner(nu_, nu_) = A_u;
  H_.topRightCorner(nu_, na_) = gamma * C;
  H_.bottomLeftCorner(na_, nu_) = gamma * C.transpose();
  H_.bottomRightCorner(na_, na_) = A_alpha;

  f_.resize(nu_ + na_);
  f_.head(nu_) = f_u;
  f_.tail(na_) = f_alpha;
}

BlockLayout CoupledQuadraticModel::layout() const {
  return BlockLayout{nu_, na_, {}};
}

Real CoupledQuadraticModel::energy(const Vector& z) const {
  return 0.5 * z.dot(H_ * z) - f_.dot(z);
}

Vector CoupledQuadraticModel::gradient(const Vector& z) const {
  return H_ * z - f_;
}

Matrix CoupledQuadraticModel::hessian(const Vector&) const { return H_; }

Bounds CoupledQuadraticModel::bounds() const {
  Bounds b = Bounds::unbounded(nu_ + na_);
  b.lower.tail(na_) = alpha_lower_;
  return b;
}

void RayleighQuotientModel::validate() const {
  require(a > 0.0, "RayleighQuotientModel: a must be positive");
  require(b > 0.0, "RayleighQuotientModel: b must be positive");
  require(c != 0.0, "RayleighQuotientModel: c must be nonzero");
}

RayleighSystem rayleigh_pencil(const RayleighQuotientModel& model,
                               const fem1d::IntervalMesh& mesh,
                               const std::vector<fem1d::DirichletBC>& bcs) {
  model.validate();
  const Index n = mesh.n_cells;

  // The first block must be clamped to zero at both boundary nodes.
  std::vector<Index> v_fixed;
  for (const auto& bc : bcs) {
    require(bc.block == fem1d::DirichletBC::Block::first,
            "rayleigh_pencil: only the kinematic block takes Dirichlet data");
    for (std::size_t i = 0; i < bc.dofs.size(); ++i) {
      require(bc.values[static_cast<Index>(i)] == 0.0,
              "rayleigh_pencil: boundary values must vanish");
      v_fixed.push_back(bc.dofs[i]);
    }
  }
  std::sort(v_fixed.begin(), v_fixed.end());
  require(v_fixed == std::vector<Index>({0, n}),
          "rayleigh_pencil: bcs must fix v at both boundary nodes");

  const fem1d::FemForms forms = assemble_forms(mesh);
  const Real a = model.a, b = model.b, c = model.c;

  // Reduce the v-block operators by eliminating the boundary dofs.
  fem1d::ReducedSystem red = fem1d::apply_dirichlet(
      forms.K, Vector::Zero(n + 1), v_fixed, Vector::Zero(2));
  const Index nv = static_cast<Index>(red.kept.size());
  const Index nb = n + 1;

  Matrix G_r(nv, nb);
  for (Index r = 0; r < nv; ++r) G_r.row(r) = forms.G.row(red.kept[r]);

  RayleighSystem sys;
  sys.v_reduction = red;
  sys.layout = BlockLayout{nv, nb, {}};

  Matrix& A = sys.pencil.A;
  A.setZero(nv + nb, nv + nb);
  A.topLeftCorner(nv, nv) = b * red.op;
  A.topRightCorner(nv, nb) = -b * c * G_r;
  A.bottomLeftCorner(nb, nv) = A.topRightCorner(nv, nb).transpose();
  A.bottomRightCorner(nb, nb) = a * forms.K + b * c * c * forms.M;

  Matrix& B = sys.pencil.B;
  B.setZero(nv + nb, nv + nb);
  B.bottomRightCorner(nb, nb) = forms.M;

  return sys;
}

RayleighFormModel::RayleighFormModel(const RayleighQuotientModel& model,
                                     const fem1d::IntervalMesh& mesh) {
  std::vector<fem1d::DirichletBC> bcs(1);
  bcs[0].block = fem1d::DirichletBC::Block::first;
  bcs[0].dofs = {0, mesh.n_cells};
  bcs[0].values = Vector::Zero(2);
  system_ = rayleigh_pencil(model, mesh, bcs);
}

BlockLayout RayleighFormModel::layout() const { return system_.layout; }

Real RayleighFormModel::energy(const Vector& z) const {
  return 0.5 * z.dot(system_.pencil.A * z);
}

Vector RayleighFormModel::gradient(const Vector& z) const {
  return system_.pencil.A * z;
}

Matrix RayleighFormModel::hessian(const Vector&) const {
  return system_.pencil.A;
}

}  // namespace varstab::models
