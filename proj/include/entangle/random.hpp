#pragma once

#include "entangle/repr_core.hpp"
#include "entangle/system.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace entangle {

using Rng = std::mt19937_64;

/// Seed used when callers do not supply one, so runs are reproducible.
inline constexpr std::uint64_t kDefaultSeed = 20021018;

inline CVector random_vector(Rng& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v.normalized();
}

inline QuantumState random_state(Rng& rng, const SystemSpec& spec) {
  return QuantumState(spec, random_vector(rng, static_cast<Eigen::Index>(spec.total_dim())));
}

inline QuantumState random_product_state(Rng& rng, const SystemSpec& spec) {
  CVector psi = CVector::Ones(1);
  for (int n : spec.factors()) psi = kron_vec(psi, random_vector(rng, n));
  return QuantumState(spec, psi);
}

/// Haar-random unitary via QR of a complex Ginibre matrix.
inline CMatrix random_unitary(Rng& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

/// Random element of SL(n, C): identity plus `spread` times a Ginibre matrix, scaled to unit determinant.
inline CMatrix random_sl(Rng& rng, int n, double spread = 1.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix z = CMatrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) += spread * Complex(normal(rng), normal(rng));
  const Complex det = z.determinant();
  return z / std::pow(det, 1.0 / n);
}

/// Per-factor random unitaries for a composite, or a single SU(2) element for a spin.
inline std::vector<CMatrix> random_local_unitaries(Rng& rng, const SystemSpec& spec) {
  std::vector<CMatrix> out;
  if (spec.is_spin()) {
    out.push_back(random_unitary(rng, 2));
  } else {
    for (int n : spec.factors()) out.push_back(random_unitary(rng, n));
  }
  return out;
}

/// Applies per-factor matrices (composite) or the irrep image of a 2x2 matrix (spin).
inline CVector apply_group(const SystemSpec& spec, const std::vector<CMatrix>& factors,
                           const CVector& psi) {
  if (spec.is_spin()) return spin_irrep(factors.at(0), spec.two_j()) * psi;
  CVector out = psi;
  for (std::size_t k = 0; k < factors.size(); ++k) out = apply_local(out, spec.factors(), k, factors[k]);
  return out;
}

inline Vec3 random_unit_vector(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec3 v(normal(rng), normal(rng), normal(rng));
  return v.normalized();
}

}  // namespace entangle
