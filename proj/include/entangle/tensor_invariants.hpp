#pragma once

#include "entangle/system.hpp"

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace entangle {

/// Read-only N-dimensional view [psi] of a composite state's amplitudes.
class TensorView {
 public:
  explicit TensorView(const QuantumState& state) : state_(&state) {
    if (!state.spec().is_composite()) {
      throw Error(ErrorCode::SpinSpecNotApplicable, "tensor view requires a composite system",
                  "system");
    }
  }

  const std::vector<int>& shape() const noexcept { return state_->spec().factors(); }
  std::size_t rank() const noexcept { return shape().size(); }
  const CVector& data() const noexcept { return state_->amplitudes(); }

  Complex at(const std::vector<int>& index) const {
    std::size_t flat = 0;
    for (std::size_t k = 0; k < index.size(); ++k) flat = flat * shape()[k] + index[k];
    return data()(static_cast<Eigen::Index>(flat));
  }

 private:
  const QuantumState* state_;
};

/// Largest deviation, over all axes, of the slice Gram matrix from I / n_k.
/// Zero exactly when parallel slices are orthogonal with equal norms.
inline double slice_gram_residual(const TensorView& t) {
  double worst = 0.0;
  for (std::size_t k = 0; k < t.rank(); ++k) {
    const int n = t.shape()[k];
    // Gram entries <slice_a, slice_b> are the conjugated one-body density entries.
    const CMatrix gram = reduced_density(t.data(), t.shape(), k).conjugate();
    const CMatrix dev = gram - CMatrix::Identity(n, n) / static_cast<double>(n);
    worst = std::max(worst, dev.cwiseAbs().maxCoeff());
  }
  return worst;
}

/// det[psi] for a square two-factor system.
inline Complex det2(const TensorView& t) {
  if (t.rank() != 2 || t.shape()[0] != t.shape()[1]) {
    throw Error(ErrorCode::ShapeError, "det2 needs two factors of equal dimension", "system");
  }
  const int n = t.shape()[0];
  CMatrix m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m(a, b) = t.data()(a * n + b);
  return m.determinant();
}

/// Cayley hyperdeterminant of a 2x2x2 tensor, written out term by term.
inline Complex hyperdet_222(const TensorView& t) {
  if (t.shape() != std::vector<int>{2, 2, 2}) {
    throw Error(ErrorCode::ShapeError, "hyperdeterminant needs shape (2,2,2)", "system");
  }
  const CVector& d = t.data();
  const Complex a000 = d(0), a001 = d(1), a010 = d(2), a011 = d(3);
  const Complex a100 = d(4), a101 = d(5), a110 = d(6), a111 = d(7);

  const Complex squares = a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 +
                          a010 * a010 * a101 * a101 + a011 * a011 * a100 * a100;
  const Complex pairs = a000 * a001 * a110 * a111 + a000 * a010 * a101 * a111 +
                        a000 * a011 * a100 * a111 + a001 * a010 * a101 * a110 +
                        a001 * a011 * a110 * a100 + a010 * a011 * a101 * a100;
  const Complex quads = a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111;
  return squares - 2.0 * pairs + 4.0 * quads;
}

/// Determinant of the matrix obtained by using the factors in `row_group` as the
/// row index and the remaining factors as the column index. Within each group the
/// lowest factor is the most significant digit.
inline Complex flattening_det(const TensorView& t, std::vector<std::size_t> row_group) {
  std::sort(row_group.begin(), row_group.end());
  std::set<std::size_t> rows(row_group.begin(), row_group.end());
  if (rows.size() != row_group.size() || (!row_group.empty() && row_group.back() >= t.rank())) {
    throw Error(ErrorCode::ShapeError, "bipartition indices must be distinct factor indices",
                "bipartition");
  }
  std::vector<std::size_t> col_group;
  for (std::size_t k = 0; k < t.rank(); ++k)
    if (!rows.count(k)) col_group.push_back(k);

  auto group_dim = [&](const std::vector<std::size_t>& g) {
    std::size_t d = 1;
    for (auto k : g) d *= static_cast<std::size_t>(t.shape()[k]);
    return d;
  };
  const std::size_t nr = group_dim(row_group), nc = group_dim(col_group);
  if (nr != nc || row_group.empty() || col_group.empty()) {
    throw Error(ErrorCode::ShapeError,
                "bipartition groups have unequal dimensions " + std::to_string(nr) + " and " +
                    std::to_string(nc),
                "bipartition");
  }

  CMatrix m(nr, nc);
  std::vector<int> index(t.rank(), 0);
  const std::size_t total = static_cast<std::size_t>(t.data().size());
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t k = t.rank(); k-- > 0;) {
      index[k] = static_cast<int>(rem % t.shape()[k]);
      rem /= t.shape()[k];
    }
    std::size_t r = 0, c = 0;
    for (auto k : row_group) r = r * t.shape()[k] + index[k];
    for (auto k : col_group) c = c * t.shape()[k] + index[k];
    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.data()(static_cast<Eigen::Index>(flat));
  }
  return m.determinant();
}

}  // namespace entangle
