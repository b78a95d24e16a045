#include "varstab/reference.hpp"

#include <cmath>

namespace varstab::reference {

ClosedFormReference closed_form_reference(Real a, Real b, Real c) {
  require(a > 0, "closed_form_reference: a must be positive");
  require(b > 0, "closed_form_reference: b must be positive");
  require(c != 0, "closed_form_reference: c must be nonzero");

  const Real pi2a = M_PI * M_PI * a;
  const Real bc2 = b * c * c;

  ClosedFormReference ref;
  ref.R_space = std::min(pi2a, bc2);
  if (pi2a < bc2) {
    ref.branch = Branch::localized;
    ref.D_star = std::cbrt(pi2a / bc2);
    ref.R_cone = bc2 * ref.D_star;
  } else {
    ref.branch = Branch::constant;
    ref.D_star = 1.0;
    ref.R_cone = bc2;
  }
  return ref;
}

Real bump_family_ratio(Real a, Real b, Real c, Real D) {
  require(D > 0 && D <= 1, "bump_family_ratio: D must lie in (0,1]");
  const Real num = a * M_PI * M_PI / (2.0 * D) + b * c * c * D * D;
  return num / (1.5 * D);
}

Real support_size(const fem1d::ScalarField& beta, Real epsilon_rel) {
  require(epsilon_rel > 0, "support_size: epsilon_rel must be positive");
  require(beta.mesh != nullptr, "support_size: field carries no mesh");
  const fem1d::IntervalMesh& mesh = *beta.mesh;
  require(beta.values.size() == mesh.n_nodes(),
          "support_size: field does not match its mesh");

  const Real bmax = beta.values.maxCoeff();
  if (bmax <= 0)
    throw std::invalid_argument("support_size: beta has no positive part");

  const Real t = epsilon_rel * bmax;
  const Real h = mesh.h;
  Real D = 0.0;
  for (Index e = 0; e < mesh.n_cells; ++e) {
    const Real b0 = beta.values[e];
    const Real b1 = beta.values[e + 1];
    const Real lo = std::min(b0, b1);
    const Real hi = std::max(b0, b1);
    if (lo > t) {
      D += h;
    } else if (hi > t) {
      D += h * (hi - t) / (hi - lo);  // linear crossing inside the cell
    }
  }
  return D;
}

}  // namespace varstab::reference
