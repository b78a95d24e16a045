#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "varstab/bifurcation.hpp"
#include "varstab/sweep.hpp"

using namespace varstab;
using namespace varstab::bifurcation;

namespace {

SymmetricPencil small_pencil(std::initializer_list<Real> a_entries, Index n) {
  SymmetricPencil p;
  p.A.resize(n, n);
  Index k = 0;
  for (Real v : a_entries) p.A(k / n, k % n) = v, ++k;
  p.B = Matrix::Identity(n, n);
  return p;
}

std::vector<Index> all_dofs(Index n) {
  std::vector<Index> idx(n);
  for (Index i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace

TEST_SUITE_BEGIN("bifurcation");

TEST_CASE("inactive set selection") {
  SUBCASE("strict interiority on the order block") {
    const BlockLayout layout{0, 3, {}};
    models::Bounds bounds = models::Bounds::unbounded(3);
    bounds.lower.setZero();
    const Vector z = (Vector(3) << 0.0, 0.3, 0.0).finished();
    CHECK(inactive_set(z, bounds, layout) == std::vector<Index>{1});
  }

  SUBCASE("kinematic dofs are always inactive constraints") {
    const BlockLayout layout{2, 3, {}};
    models::Bounds bounds = models::Bounds::unbounded(5);
    bounds.lower.tail(3).setZero();
    const Vector z = (Vector(5) << -3.0, 9.0, 0.0, 0.3, 0.0).finished();
    CHECK(inactive_set(z, bounds, layout) == std::vector<Index>{0, 1, 3});
  }

  SUBCASE("interior state yields everything minus pinned dofs") {
    BlockLayout layout{2, 2, {0}};
    models::Bounds bounds = models::Bounds::unbounded(4);
    bounds.lower.tail(2).setConstant(-1.0);
    const Vector z = (Vector(4) << 0.0, 1.0, 0.5, 0.5).finished();
    CHECK(inactive_set(z, bounds, layout) == std::vector<Index>{1, 2, 3});
  }

  SUBCASE("fully clamped order parameter leaves the kinematic block") {
    const BlockLayout layout{2, 3, {}};
    models::Bounds bounds = models::Bounds::unbounded(5);
    bounds.lower.tail(3).setZero();
    const Vector z = (Vector(5) << 1.0, 2.0, 0.0, 0.0, 0.0).finished();
    CHECK(inactive_set(z, bounds, layout) == std::vector<Index>{0, 1});
  }

  SUBCASE("bound violation rejected") {
    const BlockLayout layout{0, 2, {}};
    models::Bounds bounds = models::Bounds::unbounded(2);
    bounds.lower.setZero();
    const Vector z = (Vector(2) << -0.5, 0.5).finished();
    CHECK_THROWS_AS(inactive_set(z, bounds, layout), InvalidState);
  }
}

TEST_CASE("small dense eigenproblems") {
  SUBCASE("diagonal") {
    const SymmetricPencil p = small_pencil({2, 0, 0, 5}, 2);
    const Spectrum spec = solve_bifurcation(p, all_dofs(2), 1);
    CHECK(spec.eigenvalues.size() == 1);
    CHECK(spec.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(spec.eigenvectors(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(spec.eigenvectors(1, 0)) <= 1e-12);
    CHECK(spec.is_positive_definite);
  }

  SUBCASE("2x2 with known pairs") {
    const SymmetricPencil p = small_pencil({2, -1, -1, 2}, 2);
    const Spectrum spec = solve_bifurcation(p, all_dofs(2), 2);
    CHECK(spec.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(spec.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
    const Real inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(spec.eigenvectors(0, 0) == doctest::Approx(inv_sqrt2));
    CHECK(spec.eigenvectors(1, 0) == doctest::Approx(inv_sqrt2));
    CHECK(std::abs(spec.eigenvectors(0, 1)) == doctest::Approx(inv_sqrt2));
    CHECK(spec.eigenvectors(0, 1) * spec.eigenvectors(1, 1) < 0.0);
  }

  SUBCASE("positive definiteness threshold") {
    const SymmetricPencil p = small_pencil({2, 0, 0, 5}, 2);
    CHECK_FALSE(solve_bifurcation(p, all_dofs(2), 1, 3.0)
                    .is_positive_definite);
    SymmetricPencil neg = p;
    neg.A(0, 0) = -2.0;
    CHECK_FALSE(solve_bifurcation(neg, all_dofs(2), 1).is_positive_definite);
  }
}

TEST_CASE("restriction to a sub-block") {
  const SymmetricPencil p = small_pencil({2, -1, 0, -1, 2, -1, 0, -1, 2}, 3);
  // only dof 1 inactive: reduced problem is the middle diagonal entry
  const Spectrum spec = solve_bifurcation(p, {1}, 1);
  CHECK(spec.eigenvalues[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spec.eigenvectors(0, 0) == 0.0);
  CHECK(spec.eigenvectors(2, 0) == 0.0);
}

TEST_CASE("benchmark pencil: space minimum against the closed form") {
  SUBCASE("stiffness branch (c = 4)") {
    const auto solve = sweep::solve_rayleigh_space(
        models::RayleighQuotientModel{1.0, 1.0, 4.0}, 200, 1);
    const Real ref = M_PI * M_PI;
    CHECK(std::abs(solve.lambda - ref) / ref <= 1e-3);
  }
  SUBCASE("constant branch (c = 2)") {
    const auto solve = sweep::solve_rayleigh_space(
        models::RayleighQuotientModel{1.0, 1.0, 2.0}, 200, 1);
    CHECK(std::abs(solve.lambda - 4.0) / 4.0 <= 1e-3);

    // the minimizer's beta component is the constant profile
    const Vector beta =
        solve.spectrum.eigenvectors.col(0).tail(solve.system.layout.second_dim);
    const Real mean = beta.mean();
    CHECK((beta.array() - mean).abs().maxCoeff() <= 1e-6 * std::abs(mean));
  }
}

TEST_CASE("returned pairs satisfy the pencil residual bound") {
  std::mt19937_64 rng(5);
  const Index n = 14;
  SymmetricPencil p;
  p.A = oracles::random_symmetric(n, rng);
  p.B = oracles::random_spd(n, rng);
  const Spectrum spec = solve_bifurcation(p, all_dofs(n), 3);
  const Real norm_a = p.A.cwiseAbs().maxCoeff();
  for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
    const Vector x = spec.eigenvectors.col(static_cast<Index>(j));
    const Real res = (p.A * x - spec.eigenvalues[j] * (p.B * x)).norm();
    CHECK(res <= 1e-8 * norm_a * x.norm());
  }

  // B-orthonormality
  for (Index j = 0; j < 3; ++j)
    for (Index l = 0; l <= j; ++l) {
      const Real ip = spec.eigenvectors.col(j).dot(p.B *
                                                   spec.eigenvectors.col(l));
      CHECK(ip == doctest::Approx(j == l ? 1.0 : 0.0).epsilon(1e-9));
    }
}

TEST_CASE("dense oracle equivalence on random pencils") {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 4 + static_cast<Index>(rng() % 27);
    SymmetricPencil p;
    p.A = oracles::random_symmetric(n, rng);
    p.B = oracles::random_spd(n, rng);
    const Spectrum spec = solve_bifurcation(p, all_dofs(n), 3);
    const auto ref = oracles::generalized_eigenvalues(p.A, p.B);
    const Real scale = std::max(std::abs(ref.front()), std::abs(ref.back()));
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(spec.eigenvalues[j] - ref[j]) <= 1e-10 * scale);
  }
}

TEST_CASE("interlacing under inactive-set enlargement") {
  std::mt19937_64 rng(41);
  const Index n = 12;
  SymmetricPencil p;
  p.A = oracles::random_symmetric(n, rng);
  p.B = oracles::random_spd(n, rng);

  Real prev = std::numeric_limits<Real>::infinity();
  for (Index m = 3; m <= n; ++m) {
    const Spectrum spec = solve_bifurcation(p, all_dofs(m), 1);
    CHECK(spec.eigenvalues[0] <= prev + 1e-11);
    prev = spec.eigenvalues[0];
  }
}

TEST_CASE("singular-B pencils go through the Schur reduction") {
  const models::RayleighQuotientModel model{1.0, 1.0, 4.0};
  const auto solve = sweep::solve_rayleigh_space(model, 24, 2);

  // reduced-pencil oracle: Schur complement against the beta mass matrix
  const sweep::RayleighReducedPencil reduced(model, 24);
  const auto ref =
      oracles::generalized_eigenvalues(reduced.dense_S(), reduced.dense_M());
  CHECK(solve.spectrum.eigenvalues[0] ==
        doctest::Approx(ref[0]).epsilon(1e-10));
  CHECK(solve.spectrum.eigenvalues[1] ==
        doctest::Approx(ref[1]).epsilon(1e-10));

  // full-pencil residual of the extended eigenvector (v recovered)
  const Vector x = solve.spectrum.eigenvectors.col(0);
  const Real res =
      (solve.system.pencil.A * x -
       solve.spectrum.eigenvalues[0] * (solve.system.pencil.B * x))
          .norm();
  CHECK(res <= 1e-8 * solve.system.pencil.A.cwiseAbs().maxCoeff() * x.norm());
}

TEST_CASE("iterative path agrees with the dense path") {
  const models::RayleighQuotientModel model{1.0, 1.0, 4.0};
  BifurcationOptions dense_opts;
  dense_opts.dense_threshold = 4000;
  BifurcationOptions iter_opts;
  iter_opts.dense_threshold = 16;  // force subspace iteration

  const auto a = sweep::solve_rayleigh_space(model, 150, 3, dense_opts);
  const auto b = sweep::solve_rayleigh_space(model, 150, 3, iter_opts);
  for (int j = 0; j < 3; ++j)
    CHECK(a.spectrum.eigenvalues[j] ==
          doctest::Approx(b.spectrum.eigenvalues[j]).epsilon(1e-10));
}

TEST_CASE("error paths") {
  const SymmetricPencil p = small_pencil({2, 0, 0, 5}, 2);
  CHECK_THROWS_AS(solve_bifurcation(p, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(solve_bifurcation(p, all_dofs(2), 0), std::invalid_argument);
  CHECK_THROWS_AS(solve_bifurcation(p, {0, 0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(solve_bifurcation(p, {0, 5}, 1), std::invalid_argument);

  SUBCASE("k clamps to the reduced dimension") {
    const Spectrum spec = solve_bifurcation(p, all_dofs(2), 9);
    CHECK(spec.k_clamped);
    CHECK(spec.eigenvalues.size() == 2);
  }

  SUBCASE("zero B on the inactive set") {
    SymmetricPencil z = p;
    z.B.setZero();
    CHECK_THROWS_AS(solve_bifurcation(z, all_dofs(2), 1), SolverError);
  }

  SUBCASE("singular kinematic block under Schur reduction") {
    SymmetricPencil s;
    s.A = Matrix::Zero(2, 2);
    s.A(1, 1) = 1.0;  // A_vv block vanishes
    s.B = Matrix::Zero(2, 2);
    s.B(1, 1) = 1.0;
    CHECK_THROWS_AS(solve_bifurcation(s, all_dofs(2), 1), SolverError);
  }
}

TEST_SUITE_END();
