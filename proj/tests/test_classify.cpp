#include <gtest/gtest.h>

#include "entangle/classify.hpp"
#include "entangle/random.hpp"
#include "fixtures.hpp"

#include <cmath>

using namespace entangle;
using namespace entangle::testing;

namespace {

StabilityVerdict moment_verdict(const QuantumState& s) {
  const auto basis = build_basis(s.spec());
  return classify_by_moment(s, basis, representation_data(s.spec(), basis));
}

}  // namespace

TEST(ClassifyByMoment, GhzIsCompletelyEntangled) {
  const auto v = moment_verdict(ghz());
  EXPECT_EQ(v.cls, StabilityClass::CompletelyEntangled);
  EXPECT_LE(v.moment_norm, v.tolerance);
  EXPECT_EQ(v.method, Method::Moment);
}

TEST(ClassifyByMoment, ProductIsCoherent) {
  const auto v = moment_verdict(basis_state(SystemSpec::composite({2, 2, 2}), 0));
  EXPECT_EQ(v.cls, StabilityClass::Coherent);
  EXPECT_NEAR(v.variance, 1.5, 1e-12);
}

TEST(ClassifyByMoment, PartialEntanglementDefers) {
  const auto v = moment_verdict(schmidt_pair(kPi / 6));
  EXPECT_EQ(v.cls, StabilityClass::Indeterminate);
  // Oracle: per-qubit <J_z> = (cos^2 - sin^2)/2 = 1/4, so |m|^2 = 2/16.
  EXPECT_NEAR(v.moment_norm, std::sqrt(2.0) / 4.0, 1e-12);
  EXPECT_NEAR(v.variance, 1.5 - 0.125, 1e-12);
  EXPECT_GT(v.margin, 0.0);
}

TEST(ClassifyByMoment, RandomProductStatesAreCoherent) {
  Rng rng(3);
  for (const auto& spec : {SystemSpec::composite({2, 2, 2}), SystemSpec::composite({3, 2}),
                           SystemSpec::composite({2, 2, 2, 2})}) {
    const auto basis = build_basis(spec);
    const auto rep = representation_data(spec, basis);
    for (int t = 0; t < 500; ++t) {
      const auto v = classify_by_moment(random_product_state(rng, spec), basis, rep);
      EXPECT_EQ(v.cls, StabilityClass::Coherent);
      EXPECT_NEAR(v.variance, rep.lambda_rho, 1e-8);
    }
  }
}

TEST(ClassifyByMoment, LocallyRotatedGhzAndEprStayCompletelyEntangled) {
  Rng rng(5);
  for (const auto& s : {ghz(), epr()}) {
    const auto& spec = s.spec();
    const auto basis = build_basis(spec);
    const auto rep = representation_data(spec, basis);
    for (int t = 0; t < 50; ++t) {
      const QuantumState moved(spec, apply_group(spec, random_local_unitaries(rng, spec), s.amplitudes()));
      EXPECT_EQ(classify_by_moment(moved, basis, rep).cls, StabilityClass::CompletelyEntangled);
    }
  }
}

TEST(ClassifyByMoment, SpinCoherentAndZeroWeight) {
  EXPECT_EQ(moment_verdict(spin_basis(4, 4)).cls, StabilityClass::Coherent);
  EXPECT_EQ(moment_verdict(spin_basis(2, 0)).cls, StabilityClass::CompletelyEntangled);
  EXPECT_EQ(moment_verdict(spin_basis(4, 0)).cls, StabilityClass::CompletelyEntangled);
}

TEST(CheckCapacity, Examples) {
  EXPECT_TRUE(check_capacity(SystemSpec::composite({2, 2})));
  EXPECT_FALSE(check_capacity(SystemSpec::composite({2, 3})));
  EXPECT_FALSE(check_capacity(SystemSpec::composite({2, 2, 5})));
  EXPECT_TRUE(check_capacity(SystemSpec::composite({2, 2, 4})));
  EXPECT_FALSE(check_capacity(SystemSpec::composite({3})));
}

TEST(CheckCapacity, SpinRejected) {
  try {
    check_capacity(SystemSpec::spin(2));
    FAIL() << "expected SpinSpecNotApplicable";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpinSpecNotApplicable);
  }
}

TEST(CheckCapacity, NoCompletelyEntangledStatesWhenViolated) {
  Rng rng(9);
  for (const auto& spec : {SystemSpec::composite({2, 3}), SystemSpec::composite({2, 2, 5})}) {
    ASSERT_FALSE(check_capacity(spec));
    const auto basis = build_basis(spec);
    double smallest = 1e9;
    for (int t = 0; t < 1000; ++t) smallest = std::min(smallest, moment_norm(random_state(rng, spec), basis));
    EXPECT_GT(smallest, 1e-6) << spec.describe();
  }
}
