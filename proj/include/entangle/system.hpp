#pragma once

#include "entangle/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace entangle {

/// Dynamic-group description: a product of SU(n_i) acting on a tensor product
/// of qudits, or SU(2) acting on the spin-j irrep.
class SystemSpec {
 public:
  enum class Kind { Composite, Spin };

  static SystemSpec composite(std::vector<int> dims) {
    if (dims.empty()) {
      throw Error(ErrorCode::InvalidSpec, "composite: at least one factor required", "system.composite");
    }
    for (int n : dims) {
      if (n < 2) {
        throw Error(ErrorCode::InvalidSpec, "composite: every factor dimension must be >= 2",
                    "system.composite");
      }
    }
    SystemSpec s;
    s.kind_ = Kind::Composite;
    s.dims_ = std::move(dims);
    return s;
  }

  /// Spin j given as the integer 2j (so spin 3/2 is `spin(3)`).
  static SystemSpec spin(int two_j) {
    if (two_j < 1) {
      throw Error(ErrorCode::InvalidSpec, "spin: j must be a positive half-integer", "system.spin");
    }
    SystemSpec s;
    s.kind_ = Kind::Spin;
    s.two_j_ = two_j;
    s.dims_ = {two_j + 1};
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  bool is_spin() const noexcept { return kind_ == Kind::Spin; }
  bool is_composite() const noexcept { return kind_ == Kind::Composite; }

  /// Factor dimensions; a spin system is treated as a single factor of size 2j+1.
  const std::vector<int>& factors() const noexcept { return dims_; }
  std::size_t num_factors() const noexcept { return dims_.size(); }

  int two_j() const noexcept { return two_j_; }
  double j() const noexcept { return 0.5 * two_j_; }

  std::size_t total_dim() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                           [](std::size_t acc, int n) { return acc * static_cast<std::size_t>(n); });
  }

  bool all_qubits() const noexcept {
    return is_composite() &&
           std::all_of(dims_.begin(), dims_.end(), [](int n) { return n == 2; });
  }

  std::string describe() const {
    if (is_spin()) {
      return two_j_ % 2 == 0 ? "spin " + std::to_string(two_j_ / 2)
                             : "spin " + std::to_string(two_j_) + "/2";
    }
    std::string out = "composite [";
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      out += (i ? "," : "") + std::to_string(dims_[i]);
    }
    return out + "]";
  }

  friend bool operator==(const SystemSpec& a, const SystemSpec& b) {
    return a.kind_ == b.kind_ && a.dims_ == b.dims_ && a.two_j_ == b.two_j_;
  }

 private:
  SystemSpec() = default;

  Kind kind_ = Kind::Composite;
  std::vector<int> dims_;
  int two_j_ = 0;
};

/// Pure state with unit-norm amplitudes. Factor 0 is the most significant index;
/// spin amplitudes run from mu = +j down to -j.
class QuantumState {
 public:
  QuantumState(SystemSpec spec, CVector amplitudes) : spec_(std::move(spec)) {
    const auto expected = spec_.total_dim();
    if (static_cast<std::size_t>(amplitudes.size()) != expected) {
      throw Error(ErrorCode::DimensionMismatch,
                  "amplitudes: expected " + std::to_string(expected) + ", got " +
                      std::to_string(amplitudes.size()),
                  "amplitudes");
    }
    scale_ = amplitudes.norm();
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
      throw Error(ErrorCode::InvalidInput, "amplitudes: state must have nonzero finite norm",
                  "amplitudes");
    }
    amps_ = amplitudes / scale_;
  }

  const SystemSpec& spec() const noexcept { return spec_; }
  const CVector& amplitudes() const noexcept { return amps_; }
  /// Norm of the amplitudes as supplied, before normalization.
  double scale() const noexcept { return scale_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amps_.size()); }

 private:
  SystemSpec spec_;
  CVector amps_;
  double scale_ = 1.0;
};

namespace detail {

/// Sizes of the index blocks to the left and right of factor k.
inline std::pair<std::size_t, std::size_t> split_dims(const std::vector<int>& dims, std::size_t k) {
  std::size_t left = 1, right = 1;
  for (std::size_t i = 0; i < k; ++i) left *= static_cast<std::size_t>(dims[i]);
  for (std::size_t i = k + 1; i < dims.size(); ++i) right *= static_cast<std::size_t>(dims[i]);
  return {left, right};
}

}  // namespace detail

/// Applies an n_k x n_k matrix to factor k of a tensor-product vector.
inline CVector apply_local(const CVector& psi, const std::vector<int>& dims, std::size_t k,
                           const CMatrix& op) {
  const auto [left, right] = detail::split_dims(dims, k);
  const auto n = static_cast<std::size_t>(dims[k]);
  CVector out = CVector::Zero(psi.size());
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t r = 0; r < right; ++r) {
      const std::size_t base = l * n * right + r;
      for (std::size_t a = 0; a < n; ++a) {
        Complex acc{0.0, 0.0};
        for (std::size_t b = 0; b < n; ++b) acc += op(a, b) * psi(base + b * right);
        out(base + a * right) = acc;
      }
    }
  }
  return out;
}

/// One-body reduced density matrix of factor k: rho[a][b] = sum psi[..a..] conj(psi[..b..]).
inline CMatrix reduced_density(const CVector& psi, const std::vector<int>& dims, std::size_t k) {
  const auto [left, right] = detail::split_dims(dims, k);
  const auto n = static_cast<std::size_t>(dims[k]);
  CMatrix rho = CMatrix::Zero(n, n);
  for (std::size_t l = 0; l < left; ++l) {
    for (std::size_t r = 0; r < right; ++r) {
      const std::size_t base = l * n * right + r;
      for (std::size_t a = 0; a < n; ++a) {
        const Complex pa = psi(base + a * right);
        for (std::size_t b = 0; b < n; ++b) rho(a, b) += pa * std::conj(psi(base + b * right));
      }
    }
  }
  return rho;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline CVector kron_vec(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

/// Embeds a local operator on factor k into the full tensor-product space.
inline CMatrix embed_local(const std::vector<int>& dims, std::size_t k, const CMatrix& op) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    out = kron(out, i == k ? op : CMatrix(CMatrix::Identity(dims[i], dims[i])));
  }
  return out;
}

}  // namespace entangle
