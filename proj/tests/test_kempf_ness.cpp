#include <gtest/gtest.h>

#include "entangle/kempf_ness.hpp"
#include "entangle/random.hpp"
#include "entangle/tensor_invariants.hpp"
#include "fixtures.hpp"

#include <cmath>

using namespace entangle;
using namespace entangle::testing;

namespace {

const SystemSpec kThreeQubits = SystemSpec::composite({2, 2, 2});
const SystemSpec kFourQubits = SystemSpec::composite({2, 2, 2, 2});

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double log_norm_along(const CVector& psi, const ObservableBasis& basis, std::size_t a, double t) {
  const auto& op = basis.operators()[a];
  const auto& spec = basis.spec();
  std::vector<CMatrix> g;
  for (std::size_t k = 0; k < spec.num_factors(); ++k) {
    const int n = spec.factors()[k];
    g.push_back(k == op.factor ? exp_hermitian(op.local, t) : CMatrix(CMatrix::Identity(n, n)));
  }
  return std::log(apply_group(spec, g, psi).squaredNorm());
}

}  // namespace

TEST(MinimizeOrbitNorm, PartiallyEntangledPairReachesClosedForm) {
  const auto s = schmidt_pair(kPi / 6);
  const auto r = minimize_orbit_norm(s, build_basis(s.spec()));
  ASSERT_EQ(r.status, MinimizationStatus::Converged);
  EXPECT_NEAR(r.minimal_norm_sq, std::sin(kPi / 3), 1e-8);
  EXPECT_LE(r.final_moment_norm, 1e-9);
}

TEST(MinimizeOrbitNorm, WStateReachesNullCone) {
  const auto s = w_state();
  const auto r = minimize_orbit_norm(s, build_basis(s.spec()));
  EXPECT_EQ(r.status, MinimizationStatus::NullCone);
  EXPECT_LE(r.minimal_norm_sq, 1e-8);
}

TEST(MinimizeOrbitNorm, WStateNormShrinksUnderDiagonalScaling) {
  // Brute-force oracle: g = diag(1/t, t) on every qubit multiplies each W amplitude by 1/t.
  const auto s = w_state();
  for (double t : {2.0, 10.0, 1e5}) {
    const CMatrix g = (CMatrix(2, 2) << 1.0 / t, 0.0, 0.0, t).finished();
    const CVector moved = apply_group(kThreeQubits, {g, g, g}, s.amplitudes());
    EXPECT_NEAR(moved.squaredNorm(), 1.0 / (t * t), 1e-15);
  }
}

TEST(MinimizeOrbitNorm, GhzIsAlreadyMinimal) {
  const auto s = ghz();
  const auto r = minimize_orbit_norm(s, build_basis(s.spec()));
  EXPECT_EQ(r.status, MinimizationStatus::Converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_LT(max_abs(r.g.full(s.spec()) - CMatrix::Identity(8, 8)), 1e-12);
  EXPECT_NEAR(r.minimal_norm_sq, 1.0, 1e-12);
}

TEST(MinimizeOrbitNorm, MonotoneAndFixedPoint) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto s = random_state(rng, t % 2 ? kThreeQubits : kFourQubits);
    const auto basis = build_basis(s.spec());
    const auto r = minimize_orbit_norm(s, basis);
    ASSERT_EQ(r.status, MinimizationStatus::Converged);
    for (std::size_t k = 1; k < r.log_norm_history.size(); ++k) {
      EXPECT_LE(r.log_norm_history[k], r.log_norm_history[k - 1] + 1e-14);
    }
    const CVector phi = r.minimal_vector.normalized();
    EXPECT_LE(moment_vector(phi, basis).norm(), 1e-9);
    const CVector direct = r.g.full(s.spec()) * s.amplitudes();
    EXPECT_NEAR(direct.squaredNorm(), r.minimal_norm_sq, 1e-9);
    for (const auto& f : r.g.factors) EXPECT_LT(std::abs(f.determinant() - 1.0), 1e-9);
  }
}

TEST(MinimizeOrbitNorm, UniqueUpToUnitaries) {
  Rng rng(13);
  for (int t = 0; t < 10; ++t) {
    const auto s = random_state(rng, kThreeQubits);
    const auto basis = build_basis(s.spec());
    const auto a = minimize_orbit_norm(s, basis);
    const QuantumState moved(kThreeQubits,
                             apply_group(kThreeQubits, random_local_unitaries(rng, kThreeQubits), s.amplitudes()));
    const auto b = minimize_orbit_norm(moved, basis);
    ASSERT_EQ(a.status, MinimizationStatus::Converged);
    ASSERT_EQ(b.status, MinimizationStatus::Converged);
    EXPECT_NEAR(a.minimal_norm_sq / b.minimal_norm_sq, 1.0, 1e-6);
  }
}

TEST(MinimizeOrbitNorm, TwoFactorClosedForm) {
  Rng rng(14);
  for (int n : {2, 3}) {
    const auto spec = SystemSpec::composite({n, n});
    const auto basis = build_basis(spec);
    for (int t = 0; t < 100; ++t) {
      const auto s = random_state(rng, spec);
      const auto r = minimize_orbit_norm(s, basis);
      ASSERT_EQ(r.status, MinimizationStatus::Converged);
      const double expected = n * std::pow(std::abs(det2(TensorView(s))), 2.0 / n);
      EXPECT_NEAR(r.minimal_norm_sq / expected, 1.0, 1e-6);
    }
  }
}

TEST(MinimizeOrbitNorm, GradientMatchesFiniteDifferences) {
  Rng rng(15);
  const double h = 1e-5;
  for (int t = 0; t < 20; ++t) {
    const auto spec = t % 2 ? kThreeQubits : SystemSpec::composite({3, 2});
    const auto s = random_state(rng, spec);
    const auto basis = build_basis(spec);
    const RVector m = moment_vector(s, basis);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      const double fd = (log_norm_along(s.amplitudes(), basis, a, h) -
                         log_norm_along(s.amplitudes(), basis, a, -h)) / (2 * h);
      EXPECT_NEAR(fd, 2.0 * m(a), 1e-6);
    }
  }
}

TEST(MinimizeOrbitNorm, SpinStates) {
  const auto basis3 = build_basis(SystemSpec::spin(2));
  EXPECT_EQ(minimize_orbit_norm(spin_basis(2, 0), basis3).status, MinimizationStatus::Converged);
  EXPECT_EQ(minimize_orbit_norm(spin_basis(2, 2), basis3).status, MinimizationStatus::NullCone);
  // Tetrahedral spin-3/2 is not a valid example; use |3/2> + |-3/2> (GHZ-like, semistable).
  const auto spec = SystemSpec::spin(3);
  const QuantumState cat(spec, (CVector(4) << 1.0, 0.0, 0.0, 1.0).finished());
  const auto r = minimize_orbit_norm(cat, build_basis(spec));
  EXPECT_EQ(r.status, MinimizationStatus::Converged);
  EXPECT_EQ(r.iterations, 0);
}

TEST(DensityMatrix, CompletelyEntangledIsScalar) {
  for (const auto& s : {ghz(), epr()}) {
    const auto r = minimize_orbit_norm(s, build_basis(s.spec()));
    const auto rho = density_matrix(r, s.spec());
    const auto d = static_cast<Eigen::Index>(s.dim());
    EXPECT_LT(max_abs(rho.matrix - CMatrix::Identity(d, d) / static_cast<double>(d)), 1e-12);
  }
}

TEST(DensityMatrix, SplitsIntoFactors) {
  const auto s = schmidt_pair(kPi / 6);
  const auto r = minimize_orbit_norm(s, build_basis(s.spec()));
  const auto rho = density_matrix(r, s.spec());
  const auto parts = factor_density_matrices(r);
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_LT(max_abs(rho.matrix - kron(parts[0].matrix, parts[1].matrix)), 1e-12);
  EXPECT_NEAR(entanglement_entropy(rho), entanglement_entropy(parts[0]) + entanglement_entropy(parts[1]), 1e-10);
}

TEST(DensityMatrix, Validity) {
  Rng rng(16);
  for (int t = 0; t < 10; ++t) {
    const auto s = random_state(rng, kThreeQubits);
    const auto rho = density_matrix(minimize_orbit_norm(s, build_basis(s.spec())), s.spec());
    EXPECT_LT(max_abs(rho.matrix - rho.matrix.adjoint()), 1e-10);
    EXPECT_NEAR(rho.matrix.trace().real(), 1.0, 1e-10);
    EXPECT_GE(rho.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(DensityMatrix, CovariantUnderLocalUnitaries) {
  // The minimizer for U psi is g U^-1, so rho(U psi) = U rho(psi) U^dagger and the
  // spectrum (hence the entropy) is invariant.
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    const auto s = random_state(rng, kFourQubits);
    const auto basis = build_basis(s.spec());
    const auto us = random_local_unitaries(rng, kFourQubits);
    GroupElement u{us};
    const QuantumState moved(kFourQubits, u.apply(kFourQubits, s.amplitudes()));
    const auto a = density_matrix(minimize_orbit_norm(s, basis), kFourQubits);
    const auto b = density_matrix(minimize_orbit_norm(moved, basis), kFourQubits);
    const CMatrix uf = u.full(kFourQubits);
    EXPECT_LT(max_abs(uf * a.matrix * uf.adjoint() - b.matrix), 1e-7);
    EXPECT_NEAR(entanglement_entropy(a), entanglement_entropy(b), 1e-8);
  }
}

TEST(DensityMatrix, RequiresConvergence) {
  const auto s = w_state();
  const auto r = minimize_orbit_norm(s, build_basis(s.spec()));
  try {
    density_matrix(r, s.spec());
    FAIL() << "expected NotSemistable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSemistable);
  }
}

TEST(DensityMatrix, DegeneracyFlaggedForSymmetricStates) {
  // Two-qubit states have a continuous stabilizer in the complex group, so
  // the minimizing g is not unique.
  const auto sym = density_matrix_checked(schmidt_pair(kPi / 6), build_basis(SystemSpec::composite({2, 2})));
  EXPECT_TRUE(sym.degenerate);
  Rng rng(18);
  const auto s = random_state(rng, kFourQubits);
  const auto generic = density_matrix_checked(s, build_basis(kFourQubits));
  EXPECT_FALSE(generic.degenerate) << generic.discrepancy;
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entanglement_entropy(DensityMatrix{CMatrix::Identity(8, 8) / 8.0}), 3.0, 1e-12);
  CMatrix proj = CMatrix::Zero(4, 4);
  proj(1, 1) = 1.0;
  EXPECT_NEAR(entanglement_entropy(DensityMatrix{proj}), 0.0, 1e-15);
  const DensityMatrix a{(CMatrix(2, 2) << 0.7, 0.0, 0.0, 0.3).finished()};
  const DensityMatrix b{(CMatrix(3, 3) << 0.5, 0.1, 0.0, 0.1, 0.25, 0.0, 0.0, 0.0, 0.25).finished()};
  EXPECT_NEAR(entanglement_entropy(DensityMatrix{kron(a.matrix, b.matrix)}),
              entanglement_entropy(a) + entanglement_entropy(b), 1e-12);
}

TEST(Entropy, MaximalOnlyForCompletelyEntangled) {
  Rng rng(19);
  const auto basis = build_basis(kFourQubits);
  KempfNessOptions opts;
  for (int t = 0; t < 200; ++t) {
    const auto s = random_state(rng, kFourQubits);
    const auto r = minimize_orbit_norm(s, basis, opts);
    ASSERT_EQ(r.status, MinimizationStatus::Converged);
    const double e = entanglement_entropy(density_matrix(r, kFourQubits));
    EXPECT_LE(e, 4.0 + 1e-10);
    if (moment_norm(s, basis) >= 1e-8) EXPECT_LT(e, 4.0 - 1e-9);
  }
  const auto ce = sparse_state(kFourQubits, {{0, 1.0}, {15, 1.0}});
  EXPECT_NEAR(entanglement_entropy(density_matrix(minimize_orbit_norm(ce, basis), kFourQubits)), 4.0, 1e-12);
}

TEST(Semistability, Verdicts) {
  const auto g = ghz();
  const auto basis = build_basis(g.spec());
  const auto rep = representation_data(g.spec(), basis);
  EXPECT_EQ(semistability(g, basis, rep).cls, StabilityClass::CompletelyEntangled);

  const auto plus = sparse_state(kThreeQubits, {{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}, {4, 1.0}, {5, 1.0}, {6, 1.0}, {7, 1.0}});
  EXPECT_EQ(semistability(plus, basis, rep).cls, StabilityClass::Unstable);
  EXPECT_EQ(semistability(w_state(), basis, rep).cls, StabilityClass::Unstable);
  EXPECT_EQ(semistability(epr_times_zero(), basis, rep).cls, StabilityClass::Unstable);
}

TEST(Semistability, RandomFourQubitIsSemistable) {
  Rng rng(20);
  const auto basis = build_basis(kFourQubits);
  const auto rep = representation_data(kFourQubits, basis);
  int semistable = 0;
  for (int t = 0; t < 50; ++t) {
    if (semistability(random_state(rng, kFourQubits), basis, rep).cls == StabilityClass::Semistable) ++semistable;
  }
  EXPECT_EQ(semistable, 50);
}

TEST(Semistability, IterationLimitIsSurfaced) {
  KempfNessOptions opts;
  opts.max_iters = 1;
  const auto s = schmidt_pair(0.2);
  const auto basis = build_basis(s.spec());
  const auto v = semistability(s, basis, representation_data(s.spec(), basis), opts);
  EXPECT_EQ(v.cls, StabilityClass::Inconclusive);
}
