#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace varstab {

using Real = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr Real kInf = std::numeric_limits<Real>::infinity();

/// Thrown when a state handed to a solver violates its preconditions
/// (e.g. an iterate outside its bounds).
class InvalidState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a solver cannot proceed (singular operator, degenerate
/// iterate, inner factorization failure).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dof layout of a two-block state stacked as [first; second].
/// `first` is the kinematic block (v or u), `second` the order-parameter
/// block (beta or alpha). `zero_dofs` are stacked indices pinned to zero
/// (Dirichlet dofs that were not eliminated).
struct BlockLayout {
  Index first_dim = 0;
  Index second_dim = 0;
  std::vector<Index> zero_dofs;

  Index dim() const { return first_dim + second_dim; }
  bool is_second(Index i) const { return i >= first_dim; }
};

/// Max-abs norm asymmetry check: ||M - M^T||_max <= tol * ||M||_max.
inline bool is_symmetric(const Matrix& m, Real rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const Real scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace varstab
