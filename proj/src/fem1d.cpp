#include "varstab/fem1d.hpp"

#include <algorithm>
#include <set>

namespace varstab::fem1d {

Vector BlockState::stacked() const {
  Vector z(dim());
  z.head(first.dim()) = first.values;
  z.tail(second.dim()) = second.values;
  return z;
}

BlockState make_block_state(std::shared_ptr<const IntervalMesh> mesh,
                            Vector first, Vector second) {
  BlockState z;
  z.first = ScalarField{mesh, std::move(first)};
  z.second = ScalarField{mesh, std::move(second)};
  if (mesh) {
    require(z.first.dim() == mesh->n_nodes() || z.first.dim() == 0,
            "BlockState: first block size does not match mesh");
    require(z.second.dim() == mesh->n_nodes() || z.second.dim() == 0,
            "BlockState: second block size does not match mesh");
  }
  require(z.first.values.allFinite() && z.second.values.allFinite(),
          "BlockState: values must be finite");
  return z;
}

BlockState split_state(const Vector& stacked, const BlockLayout& layout) {
  require(stacked.size() == layout.dim(), "split_state: dimension mismatch");
  BlockState z;
  z.first = ScalarField{nullptr, stacked.head(layout.first_dim)};
  z.second = ScalarField{nullptr, stacked.tail(layout.second_dim)};
  return z;
}

IntervalMesh build_mesh(Index n_cells) {
  require(n_cells >= 1, "build_mesh: n_cells must be positive");
  IntervalMesh mesh;
  mesh.n_cells = n_cells;
  mesh.h = 1.0 / static_cast<Real>(n_cells);
  mesh.nodes = Vector::LinSpaced(n_cells + 1, 0.0, 1.0);
  return mesh;
}

FemForms assemble_forms(const IntervalMesh& mesh) {
  require(mesh.n_cells >= 1, "assemble_forms: invalid mesh");
  const Index n = mesh.n_cells;
  const Real h = mesh.h;

  // Closed-form element matrices; P1 integrals are exact.
  Eigen::Matrix2d Ke, Me, Ge;
  Ke << 1.0, -1.0, -1.0, 1.0;
  Ke /= h;
  Me << 2.0, 1.0, 1.0, 2.0;
  Me *= h / 6.0;
  Ge << -0.5, -0.5, 0.5, 0.5;

  FemForms f;
  f.K = Matrix::Zero(n + 1, n + 1);
  f.M = Matrix::Zero(n + 1, n + 1);
  f.G = Matrix::Zero(n + 1, n + 1);
  for (Index e = 0; e < n; ++e) {
    f.K.block<2, 2>(e, e) += Ke;
    f.M.block<2, 2>(e, e) += Me;
    f.G.block<2, 2>(e, e) += Ge;
  }
  return f;
}

ReducedSystem apply_dirichlet(const Matrix& op, const Vector& rhs,
                              const std::vector<Index>& dofs,
                              const Vector& values) {
  const Index dim = op.rows();
  require(op.cols() == dim, "apply_dirichlet: operator not square");
  require(rhs.size() == dim, "apply_dirichlet: rhs dimension mismatch");
  require(static_cast<Index>(dofs.size()) == values.size(),
          "apply_dirichlet: dofs/values size mismatch");

  std::set<Index> constrained;
  for (Index d : dofs) {
    require(d >= 0 && d < dim, "apply_dirichlet: dof index out of range");
    require(constrained.insert(d).second, "apply_dirichlet: duplicate dof");
  }

  ReducedSystem sys;
  sys.eliminated.assign(constrained.begin(), constrained.end());
  sys.prescribed.resize(sys.eliminated.size());
  for (std::size_t i = 0; i < sys.eliminated.size(); ++i) {
    // values given in caller order; map through the sorted elimination list
    auto it = std::find(dofs.begin(), dofs.end(), sys.eliminated[i]);
    sys.prescribed[static_cast<Index>(i)] =
        values[static_cast<Index>(it - dofs.begin())];
  }
  for (Index i = 0; i < dim; ++i)
    if (!constrained.count(i)) sys.kept.push_back(i);

  const Index m = static_cast<Index>(sys.kept.size());
  sys.op.resize(m, m);
  sys.rhs.resize(m);
  for (Index r = 0; r < m; ++r) {
    sys.rhs[r] = rhs[sys.kept[r]];
    for (Index s = 0; s < m; ++s) sys.op(r, s) = op(sys.kept[r], sys.kept[s]);
    for (std::size_t j = 0; j < sys.eliminated.size(); ++j)
      sys.rhs[r] -= op(sys.kept[r], sys.eliminated[j]) *
                    sys.prescribed[static_cast<Index>(j)];
  }
  return sys;
}

Vector extend_by_values(const Vector& reduced, const ReducedSystem& sys) {
  require(reduced.size() == static_cast<Index>(sys.kept.size()),
          "extend_by_values: reduced size mismatch");
  Vector full(reduced.size() + static_cast<Index>(sys.eliminated.size()));
  for (Index r = 0; r < reduced.size(); ++r) full[sys.kept[r]] = reduced[r];
  for (std::size_t j = 0; j < sys.eliminated.size(); ++j)
    full[sys.eliminated[j]] = sys.prescribed[static_cast<Index>(j)];
  return full;
}

Vector interpolate_nodal(const IntervalMesh& from, const Vector& values,
                         const IntervalMesh& to) {
  require(values.size() == from.n_nodes(),
          "interpolate_nodal: values do not match source mesh");
  Vector out(to.n_nodes());
  for (Index i = 0; i < to.n_nodes(); ++i) {
    const Real x = to.nodes[i];
    const Real pos = x / from.h;
    Index cell = std::min(static_cast<Index>(pos), from.n_cells - 1);
    const Real t = std::clamp(pos - static_cast<Real>(cell), 0.0, 1.0);
    out[i] = (1.0 - t) * values[cell] + t * values[cell + 1];
  }
  return out;
}

}  // namespace varstab::fem1d
