#pragma once

// Signed position of the origin relative to the convex hull of a point set.

#include "entangle/double_description.hpp"
#include "entangle/exact.hpp"
#include "entangle/types.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace entangle {

/// Minimum-norm point of the convex hull (Wolfe's algorithm).
inline RVector min_norm_point(const std::vector<RVector>& pts) {
  if (pts.empty()) throw Error(ErrorCode::InvalidInput, "convex hull of an empty point set");
  const Eigen::Index d = pts[0].size();
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.squaredNorm());
  const double eps = 1e-13 * std::max(scale, 1e-300);

  std::size_t start = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].squaredNorm() < pts[start].squaredNorm()) start = i;
  std::vector<std::size_t> s{start};
  std::vector<double> lam{1.0};
  RVector x = pts[start];

  for (int major = 0; major < 1000; ++major) {
    std::size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double v = x.dot(pts[i]);
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (x.squaredNorm() - best <= eps) break;
    if (std::find(s.begin(), s.end(), j) != s.end()) break;
    s.push_back(j);
    lam.push_back(0.0);

    for (int minor = 0; minor < 1000; ++minor) {
      // Affine minimizer over the current corral: [P^T P 1; 1^T 0][mu; nu] = [0; 1].
      const auto k = static_cast<Eigen::Index>(s.size());
      RMatrix p(d, k);
      for (Eigen::Index c = 0; c < k; ++c) p.col(c) = pts[s[c]];
      RMatrix kkt = RMatrix::Zero(k + 1, k + 1);
      kkt.topLeftCorner(k, k) = p.transpose() * p;
      kkt.block(0, k, k, 1).setOnes();
      kkt.block(k, 0, 1, k).setOnes();
      RVector rhs = RVector::Zero(k + 1);
      rhs(k) = 1.0;
      const RVector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      const RVector mu = sol.head(k);

      if (mu.minCoeff() > 1e-14) {
        for (Eigen::Index c = 0; c < k; ++c) lam[c] = mu(c);
        break;
      }
      double theta = 1.0;
      for (Eigen::Index c = 0; c < k; ++c) {
        if (mu(c) <= 1e-14) theta = std::min(theta, lam[c] / (lam[c] - mu(c)));
      }
      for (Eigen::Index c = 0; c < k; ++c) lam[c] += theta * (mu(c) - lam[c]);
      std::vector<std::size_t> s2;
      std::vector<double> l2;
      for (Eigen::Index c = 0; c < k; ++c) {
        if (lam[c] > 1e-14) {
          s2.push_back(s[c]);
          l2.push_back(lam[c]);
        }
      }
      s = std::move(s2);
      lam = std::move(l2);
    }
    RVector nx = RVector::Zero(d);
    double total = 0.0;
    for (std::size_t c = 0; c < s.size(); ++c) total += lam[c];
    for (std::size_t c = 0; c < s.size(); ++c) nx += (lam[c] / total) * pts[s[c]];
    if (nx.squaredNorm() >= x.squaredNorm() - eps * 1e-3 && major > 0) {
      x = nx.squaredNorm() < x.squaredNorm() ? nx : x;
      break;
    }
    x = nx;
  }
  return x;
}

/// Dimension of the affine hull, by numerical rank.
inline int affine_dimension(const std::vector<RVector>& pts) {
  if (pts.size() < 2) return 0;
  RMatrix m(pts[0].size(), static_cast<Eigen::Index>(pts.size() - 1));
  for (std::size_t i = 1; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i - 1)) = pts[i] - pts[0];
  Eigen::FullPivLU<RMatrix> lu(m);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

/// Signed distance of the origin to the boundary of the convex hull: negative outside
/// (minus the distance to the hull), zero on the boundary or when the hull is not
/// full-dimensional, positive inside (distance to the nearest facet).
inline double hull_margin(const std::vector<RVector>& pts) {
  if (pts.empty()) throw Error(ErrorCode::InvalidInput, "hull margin of an empty support");
  const double dist = min_norm_point(pts).norm();
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.norm());
  if (dist > 1e-10 * std::max(scale, 1.0)) return -dist;
  const auto d = static_cast<std::size_t>(pts[0].size());
  if (affine_dimension(pts) < static_cast<int>(d)) return 0.0;

  // Facets are the extreme rays (a, b) of { b - <a, p_i> >= 0 }.
  const auto ints = exact::integerize(pts);
  std::vector<exact::IntVector> rows;
  for (const auto& p : ints.rows) {
    exact::IntVector r(d + 1);
    for (std::size_t k = 0; k < d; ++k) r[k] = -p[k];
    r[d] = 1;
    rows.push_back(r);
  }
  double depth = std::numeric_limits<double>::infinity();
  for (const auto& ray : extreme_rays(rows, d + 1)) {
    double an = 0.0;
    for (std::size_t k = 0; k < d; ++k) an += static_cast<double>(ray[k]) * static_cast<double>(ray[k]);
    if (an == 0.0) continue;
    depth = std::min(depth, static_cast<double>(ray[d]) / std::sqrt(an));
  }
  return depth / static_cast<double>(ints.denominator);
}

}  // namespace entangle
