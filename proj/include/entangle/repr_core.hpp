#pragma once

#include "entangle/system.hpp"
#include "entangle/types.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace entangle {

/// Spin operators J_x, J_y, J_z on the (2j+1)-dimensional irrep, basis mu = +j ... -j.
inline std::array<CMatrix, 3> spin_matrices(int two_j) {
  const int dim = two_j + 1;
  const double j = 0.5 * two_j;
  CMatrix jp = CMatrix::Zero(dim, dim);
  CMatrix jz = CMatrix::Zero(dim, dim);
  for (int idx = 0; idx < dim; ++idx) {
    const double mu = j - idx;
    jz(idx, idx) = mu;
    if (idx > 0) jp(idx - 1, idx) = std::sqrt((j - mu) * (j + mu + 1.0));
  }
  const CMatrix jm = jp.adjoint();
  const Complex i{0.0, 1.0};
  return {CMatrix(0.5 * (jp + jm)), CMatrix(-0.5 * i * (jp - jm)), jz};
}

/// Generalized Gell-Mann basis of su(n) scaled by 1/2, so tr(T_a T_b) = delta_ab / 2.
/// For n = 2 this yields sigma_x/2, sigma_y/2, sigma_z/2 in that order.
inline std::vector<CMatrix> su_n_generators(int n) {
  std::vector<CMatrix> out;
  const Complex i{0.0, 1.0};
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      CMatrix sym = CMatrix::Zero(n, n);
      sym(a, b) = sym(b, a) = 0.5;
      CMatrix asym = CMatrix::Zero(n, n);
      asym(a, b) = -0.5 * i;
      asym(b, a) = 0.5 * i;
      out.push_back(sym);
      out.push_back(asym);
    }
  }
  for (int l = 1; l < n; ++l) {
    CMatrix d = CMatrix::Zero(n, n);
    const double c = std::sqrt(2.0 / (l * (l + 1.0))) * 0.5;
    for (int m = 0; m < l; ++m) d(m, m) = c;
    d(l, l) = -c * l;
    out.push_back(d);
  }
  return out;
}

/// exp(-i t H) for Hermitian H.
inline CMatrix exp_minus_i(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, -t * es.eigenvalues()(k));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Binomial coefficient as a double (exact for the small arguments used here).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

/// Image of a 2x2 matrix in the spin-j irrep (symmetric power on binary forms).
inline CMatrix spin_irrep(const CMatrix& g, int two_j) {
  const int n = two_j;
  CMatrix out = CMatrix::Zero(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) {
    // (g00 x + g10 y)^k (g01 x + g11 y)^(n-k), collecting powers of x.
    std::vector<Complex> poly(n + 1, Complex{0.0, 0.0});
    for (int p = 0; p <= k; ++p) {
      const Complex a = binomial(k, p) * std::pow(g(0, 0), p) * std::pow(g(1, 0), k - p);
      for (int q = 0; q <= n - k; ++q) {
        poly[p + q] += a * binomial(n - k, q) * std::pow(g(0, 1), q) * std::pow(g(1, 1), n - k - q);
      }
    }
    const int col = n - k;
    for (int kp = 0; kp <= n; ++kp) {
      out(n - kp, col) = poly[kp] * std::sqrt(binomial(n, k) / binomial(n, kp));
    }
  }
  return out;
}

/// One basis element of the Lie algebra, acting on a single factor.
struct Observable {
  std::size_t factor = 0;
  CMatrix local;
};

/// Orthonormal Hermitian traceless basis of the dynamic Lie algebra, stored factor-locally.
class ObservableBasis {
 public:
  ObservableBasis(SystemSpec spec, std::vector<Observable> ops, double metric_normalization)
      : spec_(std::move(spec)), ops_(std::move(ops)), metric_(metric_normalization) {}

  const SystemSpec& spec() const noexcept { return spec_; }
  const std::vector<Observable>& operators() const noexcept { return ops_; }
  std::size_t size() const noexcept { return ops_.size(); }
  /// Value of tr(X_a X_a) in the defining representation.
  double metric_normalization() const noexcept { return metric_; }

  /// The operator embedded in the full representation space.
  CMatrix full(std::size_t a) const {
    return embed_local(spec_.factors(), ops_[a].factor, ops_[a].local);
  }

 private:
  SystemSpec spec_;
  std::vector<Observable> ops_;
  double metric_;
};

inline ObservableBasis build_basis(const SystemSpec& spec) {
  std::vector<Observable> ops;
  if (spec.is_spin()) {
    for (auto& m : spin_matrices(spec.two_j())) ops.push_back({0, m});
  } else {
    for (std::size_t k = 0; k < spec.num_factors(); ++k) {
      for (auto& m : su_n_generators(spec.factors()[k])) ops.push_back({k, m});
    }
  }
  return ObservableBasis(spec, std::move(ops), 0.5);
}

/// Casimir and the two Weyl pairings that bound the total variance.
struct RepresentationData {
  double casimir = 0.0;
  double lambda_rho = 0.0;
  double lambda_lambda_rho = 0.0;
};

/// Expectation <psi|X|psi> of a Hermitian operator on the full space.
inline double expectation(const QuantumState& state, const CMatrix& x) {
  if (x.rows() != x.cols() || static_cast<std::size_t>(x.rows()) != state.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "operator is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                    " but state has dimension " + std::to_string(state.dim()),
                "operator");
  }
  const Complex v = state.amplitudes().dot(x * state.amplitudes());
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, x.norm())) {
    throw Error(ErrorCode::InvalidInput, "operator is not Hermitian", "operator");
  }
  return v.real();
}

namespace detail {

inline void check_basis(const QuantumState& state, const ObservableBasis& basis) {
  if (!(state.spec() == basis.spec())) {
    throw Error(ErrorCode::DimensionMismatch,
                "basis built for " + basis.spec().describe() + " but state is " +
                    state.spec().describe(),
                "basis");
  }
}

/// Reduced density matrices for every factor of the state.
inline std::vector<CMatrix> local_densities(const CVector& psi, const SystemSpec& spec) {
  std::vector<CMatrix> out;
  out.reserve(spec.num_factors());
  for (std::size_t k = 0; k < spec.num_factors(); ++k) {
    out.push_back(reduced_density(psi, spec.factors(), k));
  }
  return out;
}

}  // namespace detail

/// Moment vector <X_a> for a unit vector psi, evaluated through one-body reduced densities.
inline RVector moment_vector(const CVector& psi, const ObservableBasis& basis) {
  const auto rhos = detail::local_densities(psi, basis.spec());
  RVector m(basis.size());
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const auto& op = basis.operators()[a];
    m(a) = (rhos[op.factor].transpose().cwiseProduct(op.local)).sum().real();
  }
  return m;
}

inline RVector moment_vector(const QuantumState& state, const ObservableBasis& basis) {
  detail::check_basis(state, basis);
  return moment_vector(state.amplitudes(), basis);
}

inline double moment_norm(const QuantumState& state, const ObservableBasis& basis) {
  return moment_vector(state, basis).norm();
}

inline RepresentationData representation_data(const SystemSpec& spec, const ObservableBasis& basis) {
  if (!(spec == basis.spec())) {
    throw Error(ErrorCode::DimensionMismatch, "basis does not match system", "basis");
  }
  RepresentationData rep;
  for (std::size_t k = 0; k < spec.num_factors(); ++k) {
    const int n = spec.factors()[k];
    CMatrix c = CMatrix::Zero(n, n);
    for (const auto& op : basis.operators()) {
      if (op.factor == k) c += op.local * op.local;
    }
    const double mean = c.diagonal().real().mean();
    const CMatrix dev = c - mean * CMatrix::Identity(n, n);
    if (dev.cwiseAbs().maxCoeff() > 1e-8 * std::abs(mean)) {
      throw Error(ErrorCode::NonScalarCasimir,
                  "sum of squared basis operators is not scalar on factor " + std::to_string(k),
                  "basis");
    }
    rep.casimir += mean;
  }
  rep.lambda_lambda_rho = rep.casimir;

  // Highest-weight product vector: the first basis vector.
  CVector top = CVector::Zero(static_cast<Eigen::Index>(spec.total_dim()));
  top(0) = 1.0;
  rep.lambda_rho = rep.casimir - moment_vector(top, basis).squaredNorm();
  return rep;
}

/// Total variance, evaluated both as a sum of per-operator variances and as
/// Casimir minus the squared moment norm. The two routes must agree.
inline double total_variance(const QuantumState& state, const ObservableBasis& basis,
                             const RepresentationData& rep) {
  detail::check_basis(state, basis);
  const auto rhos = detail::local_densities(state.amplitudes(), basis.spec());
  double direct = 0.0;
  double msq = 0.0;
  for (const auto& op : basis.operators()) {
    const CMatrix& rho = rhos[op.factor];
    const double mean = (rho.transpose().cwiseProduct(op.local)).sum().real();
    const CMatrix sq = op.local * op.local;
    const double second = (rho.transpose().cwiseProduct(sq)).sum().real();
    direct += second - mean * mean;
    msq += mean * mean;
  }
  const double via_casimir = rep.casimir - msq;
  if (std::abs(direct - via_casimir) > 1e-9 * std::max(1.0, std::abs(via_casimir))) {
    throw Error(ErrorCode::FormulaMismatch,
                "total variance routes disagree: " + std::to_string(direct) + " vs " +
                    std::to_string(via_casimir));
  }
  return direct;
}

}  // namespace entangle
