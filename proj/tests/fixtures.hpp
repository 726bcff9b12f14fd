#pragma once

// Named states and brute-force helpers shared by the test suites.

#include "entangle/repr_core.hpp"
#include "entangle/system.hpp"

#include <cmath>
#include <initializer_list>
#include <utility>
#include <vector>

namespace entangle::testing {

inline QuantumState basis_state(const SystemSpec& spec, std::size_t index) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(spec.total_dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return QuantumState(spec, v);
}

/// State from (flat index, amplitude) pairs; normalized on construction.
inline QuantumState sparse_state(const SystemSpec& spec,
                                 std::initializer_list<std::pair<std::size_t, Complex>> terms) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(spec.total_dim()));
  for (const auto& [i, a] : terms) v(static_cast<Eigen::Index>(i)) += a;
  return QuantumState(spec, v);
}

inline QuantumState ghz() {
  return sparse_state(SystemSpec::composite({2, 2, 2}), {{0, 1.0}, {7, 1.0}});
}

inline QuantumState w_state() {
  return sparse_state(SystemSpec::composite({2, 2, 2}), {{1, 1.0}, {2, 1.0}, {4, 1.0}});
}

inline QuantumState epr() {
  return sparse_state(SystemSpec::composite({2, 2}), {{0, 1.0}, {3, 1.0}});
}

/// cos(theta)|00> + sin(theta)|11>
inline QuantumState schmidt_pair(double theta) {
  return sparse_state(SystemSpec::composite({2, 2}), {{0, std::cos(theta)}, {3, std::sin(theta)}});
}

/// EPR on the first two qubits, |0> on the third.
inline QuantumState epr_times_zero() {
  return sparse_state(SystemSpec::composite({2, 2, 2}), {{0, 1.0}, {6, 1.0}});
}

/// Spin-j basis state |mu>, with mu given as 2*mu.
inline QuantumState spin_basis(int two_j, int two_mu) {
  return basis_state(SystemSpec::spin(two_j), static_cast<std::size_t>((two_j - two_mu) / 2));
}

/// <psi|X|psi> computed with the full embedded operator (independent of the
/// reduced-density route used by the library).
inline RVector dense_moment_vector(const QuantumState& s, const ObservableBasis& basis) {
  RVector m(basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a) {
    m(a) = (s.amplitudes().dot(basis.full(a) * s.amplitudes())).real();
  }
  return m;
}

}  // namespace entangle::testing
