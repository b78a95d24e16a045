#pragma once

#include "varstab/types.hpp"

namespace varstab {

/// Pair of symmetric operators (A, B) defining the generalized
/// eigenproblem A x = lambda B x. B is positive semidefinite and may be
/// singular (zero kinematic block in the Rayleigh pencil).
struct SymmetricPencil {
  Matrix A;
  Matrix B;

  Index dim() const { return A.rows(); }
};

/// Symmetry and shape checks; `psd_samples` > 0 additionally probes
/// x^T B x >= 0 with seeded random vectors.
void validate_pencil(const SymmetricPencil& pencil, int psd_samples = 0,
                     unsigned seed = 1234);

}  // namespace varstab
