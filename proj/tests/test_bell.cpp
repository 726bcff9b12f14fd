#include <gtest/gtest.h>

#include "entangle/bell.hpp"
#include "entangle/random.hpp"

#include <cmath>

using namespace entangle;

namespace {

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

RVector random_joint(Rng& rng, std::size_t n) {
  std::exponential_distribution<double> ex(1.0);
  RVector p(static_cast<Eigen::Index>(n));
  for (auto& x : p) x = ex(rng);
  return p / p.sum();
}

SparseMatrix sparse(const RMatrix& a) { return a.sparseView(); }

}  // namespace

TEST(PhaseOne, FeasibleSystem) {
  RMatrix a(2, 3);
  a << 1, 1, 0, 0, 1, 1;
  const RVector b = (RVector(2) << 1.0, 2.0).finished();
  const auto r = phase_one(sparse(a), b);
  ASSERT_TRUE(r.feasible);
  EXPECT_LT((a * r.x - b).norm(), 1e-12);
  EXPECT_GE(r.x.minCoeff(), 0.0);
}

TEST(PhaseOne, InfeasibleSystemHasFarkasVector) {
  // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
  RMatrix a(2, 2);
  a << 1, 1, 1, 1;
  const RVector b = (RVector(2) << 1.0, 2.0).finished();
  const auto r = phase_one(sparse(a), b);
  ASSERT_FALSE(r.feasible);
  EXPECT_GE((a.transpose() * r.dual).minCoeff(), -1e-12);
  EXPECT_LT(b.dot(r.dual), -1e-9);
}

TEST(PhaseOne, NegativeRightHandSide) {
  RMatrix a(1, 2);
  a << -1, -2;
  const RVector b = (RVector(1) << -4.0).finished();
  const auto r = phase_one(sparse(a), b);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR((a * r.x - b).norm(), 0.0, 1e-12);
}

TEST(PhaseOne, RandomSystemsObeyFarkasAlternative) {
  Rng rng(71);
  std::uniform_int_distribution<int> coef(-2, 3);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 200; ++t) {
    RMatrix a(4, 6);
    for (auto& x : a.reshaped()) x = coef(rng);
    RVector b(4);
    for (auto& x : b) x = coef(rng);
    const auto r = phase_one(sparse(a), b);
    if (r.feasible) {
      ++feasible;
      EXPECT_LT((a * r.x - b).norm(), 1e-8);
      EXPECT_GE(r.x.minCoeff(), 0.0);
    } else {
      ++infeasible;
      EXPECT_GE((a.transpose() * r.dual).minCoeff(), -1e-9);
      EXPECT_LT(b.dot(r.dual), -1e-9);
    }
  }
  EXPECT_GT(feasible, 10);
  EXPECT_GT(infeasible, 10);
}

TEST(Scenario, ValidatesCommutation) {
  const auto c = chsh_scenario();
  EXPECT_EQ(c.joint_size(), 16u);
  EXPECT_EQ(c.spectra[0], (std::vector<double>{-1.0, 1.0}));
  EXPECT_EQ(error_of([&] { make_scenario(c.observables, {{0, 1}}); }), ErrorCode::NotCommuting);
  EXPECT_EQ(error_of([&] { make_scenario(c.observables, {{0, 7}}); }), ErrorCode::InvalidInput);
  EXPECT_EQ(error_of([] { make_scenario({CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)}, {}); }),
            ErrorCode::DimensionMismatch);
}

TEST(Scenario, DegenerateSpectraMergeProjectors) {
  const auto p = pentagon_scenario(regular_pentagon());
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(p.spectra[i], (std::vector<double>{-1.0, 1.0}));
    EXPECT_NEAR(p.projectors[i][1].trace().real(), 2.0, 1e-12);
  }
}

TEST(KellererFunction, OperatorMatchesCorrelators) {
  const auto c = chsh_scenario();
  const auto f = chsh_function(c);
  const CMatrix expected = c.observables[0] * c.observables[2] + c.observables[1] * c.observables[2] +
                           c.observables[1] * c.observables[3] - c.observables[0] * c.observables[3] +
                           2.0 * CMatrix::Identity(4, 4);
  EXPECT_LT((function_operator(c, f) - expected).norm(), 1e-12);
  const auto terms = correlator_expansion(c, function_values(c, f));
  ASSERT_EQ(terms.size(), 5u);
  EXPECT_EQ(error_of([&] { check_function(c, KellererFunction{}); }), ErrorCode::ShapeError);
}

TEST(KellererFunction, DecomposeRoundTrip) {
  const auto c = chsh_scenario();
  const RVector v = function_values(c, chsh_function(c));
  EXPECT_LT((function_values(c, decompose(c, v)) - v).norm(), 1e-10);
  // A function coupling A1 and A2 is not of Kellerer form.
  RVector bad(16);
  for (std::size_t i = 0; i < 16; ++i) {
    const auto d = c.decode(i);
    bad(static_cast<Eigen::Index>(i)) = d[0] == d[1] ? 1.0 : 0.0;
  }
  EXPECT_EQ(error_of([&] { decompose(c, bad); }), ErrorCode::InvalidInput);
}

TEST(Chsh, ClassicalBoundByExhaustion) {
  int best = -100;
  for (int m = 0; m < 16; ++m) {
    const int a1 = m & 1 ? 1 : -1, a2 = m & 2 ? 1 : -1, b1 = m & 4 ? 1 : -1, b2 = m & 8 ? 1 : -1;
    best = std::max(best, a1 * b1 + a2 * b1 + a2 * b2 - a1 * b2);
  }
  EXPECT_EQ(best, 2);
  const auto c = chsh_scenario();
  EXPECT_NEAR(function_values(c, chsh_function(c)).minCoeff(), 0.0, 1e-12);
}

TEST(Chsh, QuantumMinimum) {
  const auto c = chsh_scenario();
  const auto q = quantum_value(c, chsh_function(c));
  EXPECT_NEAR(q.value, 2.0 - 2.0 * std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(expectation_value(c, chsh_function(c), q.state), q.value, 1e-12);
}

TEST(Chsh, ProductStatesRespectTheBound) {
  // Product states never violate a Bell inequality.
  Rng rng(72);
  const auto c = chsh_scenario();
  for (int t = 0; t < 50; ++t) {
    const CVector a = random_vector(rng, 2).normalized(), b = random_vector(rng, 2).normalized();
    CVector psi(4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) psi(2 * i + j) = a(i) * b(j);
    EXPECT_GE(expectation_value(c, chsh_function(c), psi), -1e-10);
  }
}

TEST(Enumerate, ChshHasOneNontrivialClass) {
  const auto c = chsh_scenario();
  const auto r = enumerate_extremal(c);
  EXPECT_EQ(r.ray_count, 24u);
  EXPECT_EQ(r.dimension, 9u);
  ASSERT_EQ(r.nontrivial_count(), 1u);
  const auto& cls = r.classes.back();
  EXPECT_FALSE(cls.trivial);
  EXPECT_TRUE(cls.extremal);
  EXPECT_EQ(cls.orbit_size, 8u);
  EXPECT_EQ(cls.values, canonical_form(c, function_values(c, chsh_function(c))));
  EXPECT_NEAR(quantum_value(c, cls.function).value / function_values(c, cls.function).maxCoeff(),
              (2.0 - 2.0 * std::sqrt(2.0)) / 4.0, 1e-9);
}

TEST(Enumerate, PentagonHasOneNontrivialClass) {
  const auto p = pentagon_scenario(regular_pentagon());
  const auto r = enumerate_extremal(p);
  EXPECT_EQ(r.ray_count, 36u);
  ASSERT_EQ(r.nontrivial_count(), 1u);
  EXPECT_EQ(r.classes.back().orbit_size, 16u);
  EXPECT_EQ(r.classes.back().values, canonical_form(p, function_values(p, pentagon_function(p))));
}

TEST(Enumerate, ThreePartyCorrelationCone) {
  const auto t = three_party_scenario();
  EnumerationOptions o;
  o.mode = ConeMode::Correlation;
  const auto r = enumerate_extremal(t, o);
  EXPECT_EQ(r.ray_count, 256u);
  EXPECT_GE(r.classes.size(), 5u);
  for (const auto& c : r.classes) {
    // Homogeneous: only full three-body correlators and a constant.
    for (const auto& term : correlator_expansion(t, function_values(t, c.function)))
      EXPECT_TRUE(term.observables.empty() || term.observables.size() == 3);
  }
}

TEST(Enumerate, CertificatesAreConeMembersAndExtremal) {
  for (const auto& s : {chsh_scenario(), pentagon_scenario(regular_pentagon())}) {
    const auto r = enumerate_extremal(s);
    for (const auto& c : r.classes) {
      EXPECT_GE(c.min_over_lambda, -1e-10);
      EXPECT_TRUE(c.extremal);
      for (auto v : c.values) EXPECT_GE(v, 0);
    }
  }
}

TEST(Enumerate, CanonicalFormIsIdempotentUnderGenerators) {
  const auto c = chsh_scenario();
  const auto r = enumerate_extremal(c);
  const auto group = detail::symmetry_group(c, 8);
  EXPECT_EQ(group.size(), r.group_order);
  for (const auto& cls : r.classes) {
    for (const auto& g : group) EXPECT_EQ(detail::canonical(c, group, detail::act(c, g, cls.values)), cls.values);
  }
}

TEST(Enumerate, SizeLimit) {
  std::vector<CMatrix> obs;
  for (int i = 0; i < 13; ++i) obs.push_back(detail::pauli(2));
  const auto s = make_scenario(obs, {{0, 1}});
  EXPECT_EQ(error_of([&] { enumerate_extremal(s); }), ErrorCode::SizeLimit);
}

TEST(Feasibility, UnivariateMarginsAreAlwaysFeasible) {
  Rng rng(73);
  const auto c = chsh_scenario();
  const auto s = make_scenario(c.observables, {{0}, {1}, {2}, {3}});
  for (int t = 0; t < 20; ++t) {
    std::vector<RVector> m;
    for (int i = 0; i < 4; ++i) m.push_back(random_joint(rng, 2));
    const auto r = classical_feasibility(s, m);
    EXPECT_TRUE(r.feasible);
    EXPECT_LT(r.residual, 1e-9);
  }
}

TEST(Feasibility, ClassicalMarginsAreFeasible) {
  Rng rng(74);
  for (const auto& s : {chsh_scenario(), pentagon_scenario(regular_pentagon()), three_party_scenario()}) {
    for (int t = 0; t < 20; ++t) {
      const auto m = classical_margins(s, random_joint(rng, s.joint_size()));
      const auto r = classical_feasibility(s, m);
      ASSERT_TRUE(r.feasible);
      EXPECT_LT(r.residual, 1e-9);
      EXPECT_GE(r.joint.minCoeff(), 0.0);
    }
  }
}

TEST(Feasibility, OptimalChshMarginsAreInfeasible) {
  const auto c = chsh_scenario();
  const auto q = quantum_value(c, chsh_function(c));
  const auto m = quantum_margins(c, q.state);
  const auto r = classical_feasibility(c, m);
  ASSERT_FALSE(r.feasible);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_GE(r.certificate_min, -1e-10);
  EXPECT_LT(r.pairing, -1e-6);
  // The certificate is a CHSH inequality.
  const RVector v = function_values(c, *r.certificate);
  const auto e = enumerate_extremal(c);
  EXPECT_EQ(canonical_form(c, v / v.maxCoeff() * 4.0), e.classes.back().values);
}

TEST(Feasibility, DualityOnQuantumMargins) {
  Rng rng(75);
  const auto c = chsh_scenario();
  int infeasible = 0;
  for (int t = 0; t < 100; ++t) {
    const auto r = classical_feasibility(c, quantum_margins(c, random_vector(rng, 4)));
    if (r.feasible) {
      EXPECT_LT(r.residual, 1e-9);
    } else {
      ++infeasible;
      ASSERT_TRUE(r.certificate.has_value());
      EXPECT_GE(r.certificate_min, -1e-10);
      EXPECT_LT(r.pairing, 0.0);
    }
  }
  EXPECT_GT(infeasible, 0);
}

TEST(Feasibility, InputValidation) {
  const auto c = chsh_scenario();
  std::vector<RVector> m(4, RVector::Constant(4, 0.25));
  EXPECT_NO_THROW(classical_feasibility(c, m));
  m[1](0) = 0.5;
  EXPECT_EQ(error_of([&] { classical_feasibility(c, m); }), ErrorCode::InvalidInput);
  m.pop_back();
  EXPECT_EQ(error_of([&] { classical_feasibility(c, m); }), ErrorCode::ShapeError);
}

TEST(Pentagon, RegularValueThreeWays) {
  const auto cfg = regular_pentagon();
  const auto r = pentagon(cfg, pentagon_axis());
  const double closed = 5.0 * std::cos(kPi / 5.0) / (1.0 + std::cos(kPi / 5.0));
  EXPECT_NEAR(r.cos2_sum, 2.236067, 1e-6);
  EXPECT_NEAR(r.cos2_sum, closed, 1e-12);
  EXPECT_NEAR((5.0 - r.expectation) / 4.0, closed, 1e-12);
  // Through the Kellerer function: <F(X)> = <sum S_i S_{i+1}> + 3.
  const auto s = pentagon_scenario(cfg);
  EXPECT_NEAR(expectation_value(s, pentagon_function(s), pentagon_axis()), r.expectation + 3.0, 1e-12);
  EXPECT_GT(r.cos2_sum, 2.0);
}

TEST(Pentagon, FunctionIsInTheCone) {
  const auto s = pentagon_scenario(regular_pentagon());
  EXPECT_NEAR(function_values(s, pentagon_function(s)).minCoeff(), 0.0, 1e-12);
}

TEST(Pentagon, RandomQuintupletsViolate) {
  Rng rng(76);
  for (int t = 0; t < 25; ++t) {
    const auto cfg = random_pentagon(rng);
    const auto r = pentagon(cfg);
    EXPECT_LT(r.min_eigenvalue, -3.0);
    EXPECT_GT(r.cos2_sum, 2.0);
  }
}

TEST(Pentagon, RejectsNonOrthogonal) {
  auto cfg = regular_pentagon();
  auto e = cfg.e;
  e[2] = (CVector(3) << 1.0, 0.0, 0.0).finished();
  EXPECT_EQ(error_of([&] { make_pentagon(e); }), ErrorCode::NotOrthogonal);
  e[2] = CVector::Ones(2);
  EXPECT_EQ(error_of([&] { make_pentagon(e); }), ErrorCode::DimensionMismatch);
}
