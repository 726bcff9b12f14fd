#pragma once

// Phase-one revised simplex for A x = b, x >= 0 with a Farkas certificate when the
// system is infeasible.

#include "entangle/types.hpp"

#include <Eigen/LU>
#include <Eigen/SparseCore>

#include <cmath>
#include <limits>
#include <vector>

namespace entangle {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct FeasibilityOptions {
  double tol = 1e-9;         // pivot and reduced-cost tolerance
  double feasible_tol = 1e-9;  // residual phase-one objective accepted as zero
  int refactor_every = 64;
  int max_iters = 0;  // 0 picks 50 (m + n)
};

struct LpResult {
  bool feasible = false;
  RVector x;     // solution when feasible
  RVector dual;  // Farkas vector z with A^T z >= 0 and b^T z < 0 when infeasible
  double infeasibility = 0.0;  // optimal phase-one objective
  int iterations = 0;
};

/// Solves min 1^T a subject to A x + a = b, x, a >= 0 (rows sign-normalized so b >= 0).
/// Dantzig pricing with a switch to Bland's rule on long degenerate runs.
inline LpResult phase_one(const SparseMatrix& a, const RVector& b, const FeasibilityOptions& opts = {}) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) throw Error(ErrorCode::DimensionMismatch, "right-hand side size does not match rows", "b");

  RVector sign = RVector::Ones(m);
  for (Eigen::Index i = 0; i < m; ++i)
    if (b(i) < 0) sign(i) = -1.0;
  const RVector rhs = sign.cwiseProduct(b);

  // Variables 0..n-1 are structural, n..n+m-1 artificial.
  auto column = [&](Eigen::Index j) {
    RVector c = RVector::Zero(m);
    if (j >= n) {
      c(j - n) = 1.0;
    } else {
      for (SparseMatrix::InnerIterator it(a, j); it; ++it) c(it.row()) = sign(it.row()) * it.value();
    }
    return c;
  };
  auto cost = [&](Eigen::Index j) { return j >= n ? 1.0 : 0.0; };

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  std::vector<bool> in_basis(static_cast<std::size_t>(n + m), false);
  for (Eigen::Index i = 0; i < m; ++i) {
    basis[static_cast<std::size_t>(i)] = n + i;
    in_basis[static_cast<std::size_t>(n + i)] = true;
  }
  RMatrix binv = RMatrix::Identity(m, m);
  RVector xb = rhs;

  auto refactor = [&] {
    RMatrix bm(m, m);
    for (Eigen::Index i = 0; i < m; ++i) bm.col(i) = column(basis[static_cast<std::size_t>(i)]);
    binv = Eigen::FullPivLU<RMatrix>(bm).inverse();
    xb = binv * rhs;
  };

  const int max_iters = opts.max_iters > 0 ? opts.max_iters : static_cast<int>(50 * (m + n));
  LpResult res;
  int degenerate_run = 0;
  RVector y(m);
  for (int it = 0;; ++it) {
    res.iterations = it;
    if (it >= max_iters) throw Error(ErrorCode::SizeLimit, "simplex iteration limit reached");
    if (it > 0 && it % opts.refactor_every == 0) refactor();

    RVector cb(m);
    for (Eigen::Index i = 0; i < m; ++i) cb(i) = cost(basis[static_cast<std::size_t>(i)]);
    y = binv.transpose() * cb;

    const bool bland = degenerate_run > 50;
    Eigen::Index enter = -1;
    double best = -opts.tol;
    for (Eigen::Index j = 0; j < n + m; ++j) {
      if (in_basis[static_cast<std::size_t>(j)]) continue;
      double d = cost(j);
      if (j >= n) {
        d -= y(j - n);
      } else {
        for (SparseMatrix::InnerIterator e(a, j); e; ++e) d -= y(e.row()) * sign(e.row()) * e.value();
      }
      if (d < best) {
        enter = j;
        best = d;
        if (bland) break;
      }
    }
    if (enter < 0) break;

    const RVector u = binv * column(enter);
    Eigen::Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (u(i) <= opts.tol) continue;
      const double r = std::max(xb(i), 0.0) / u(i);
      if (r < ratio - 1e-12 ||
          (r <= ratio + 1e-12 && leave >= 0 && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        ratio = r;
        leave = i;
      }
    }
    if (leave < 0) break;  // cannot happen in phase one; the objective is bounded by zero
    degenerate_run = ratio < 1e-12 ? degenerate_run + 1 : 0;

    const double piv = u(leave);
    binv.row(leave) /= piv;
    xb(leave) /= piv;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leave || u(i) == 0.0) continue;
      binv.row(i) -= u(i) * binv.row(leave);
      xb(i) -= u(i) * xb(leave);
    }
    in_basis[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = false;
    in_basis[static_cast<std::size_t>(enter)] = true;
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  refactor();

  res.x = RVector::Zero(n);
  res.infeasibility = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index j = basis[static_cast<std::size_t>(i)];
    const double v = std::max(xb(i), 0.0);
    if (j < n) res.x(j) = v;
    else res.infeasibility += v;
  }
  res.feasible = res.infeasibility <= opts.feasible_tol;
  if (!res.feasible) {
    RVector cb(m);
    for (Eigen::Index i = 0; i < m; ++i) cb(i) = cost(basis[static_cast<std::size_t>(i)]);
    res.dual = -sign.cwiseProduct(binv.transpose() * cb);
  }
  return res;
}

}  // namespace entangle
