#pragma once

// Closed-form references for the benchmark Rayleigh ratio and the
// support-size measurement used to classify minimizer profiles.

#include "varstab/fem1d.hpp"
#include "varstab/types.hpp"

namespace varstab::reference {

enum class Branch { constant, localized };

/// Minima of the benchmark ratio over the full space and over the cone.
///
/// Space: min(pi^2 a, b c^2). Cone: when pi^2 a < b c^2 the minimizer
/// localizes on a boundary support of size D* = (pi^2 a / (b c^2))^(1/3)
/// with profile proportional to 1 + cos(pi x / D*), and the minimum is
/// b c^2 D*; otherwise the constant profile wins with minimum b c^2.
struct ClosedFormReference {
  Real R_space = 0.0;
  Real R_cone = 0.0;
  Real D_star = 1.0;
  Branch branch = Branch::constant;
};

ClosedFormReference closed_form_reference(Real a, Real b, Real c);

/// Value of the ratio on the boundary-bump trial family with support D:
/// (a pi^2 / (2 D) + b c^2 D^2) / (3 D / 2). Exposed for the oracle
/// cross-check of the closed form.
Real bump_family_ratio(Real a, Real b, Real c, Real D);

/// Measure of { x in (0,1) : beta_h(x) > epsilon_rel * max beta },
/// computed cell-wise with linear interpolation of threshold crossings.
Real support_size(const fem1d::ScalarField& beta, Real epsilon_rel = 1e-3);

inline const char* branch_name(Branch b) {
  return b == Branch::localized ? "localized" : "constant";
}

}  // namespace varstab::reference
