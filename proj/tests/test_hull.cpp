#include <gtest/gtest.h>

#include "entangle/double_description.hpp"
#include "entangle/hull.hpp"
#include "entangle/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace entangle;
using exact::IntVector;

namespace {

RVector vec(std::initializer_list<double> xs) {
  RVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

std::set<IntVector> as_set(const std::vector<IntVector>& rays) { return {rays.begin(), rays.end()}; }

/// Brute force: every (n-1)-subset of rows with a one-dimensional kernel gives a
/// candidate ray; keep the feasible ones.
std::set<IntVector> brute_force_rays(const std::vector<IntVector>& a, std::size_t n) {
  std::set<IntVector> out;
  const std::size_t m = a.size();
  std::vector<bool> pick(m, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n - 1), true);
  do {
    exact::Echelon e(n);
    for (std::size_t i = 0; i < m; ++i)
      if (pick[i]) e.insert(a[i]);
    if (e.rank() != n - 1) continue;
    const IntVector k = e.kernel().at(0);
    for (int sign : {1, -1}) {
      IntVector r = k;
      for (auto& x : r) x *= sign;
      bool ok = true;
      for (const auto& row : a) ok = ok && exact::dot(row, r) >= 0;
      if (ok) out.insert(r);
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return out;
}

}  // namespace

TEST(Exact, EchelonRankAndKernel) {
  exact::Echelon e(3);
  EXPECT_TRUE(e.insert({1, 2, 3}));
  EXPECT_TRUE(e.insert({2, 4, 7}));
  EXPECT_FALSE(e.insert({3, 6, 10}));
  const auto k = e.kernel();
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(exact::dot({1, 2, 3}, k[0]), 0);
  EXPECT_EQ(exact::dot({2, 4, 7}, k[0]), 0);
  EXPECT_EQ(exact::gcd_of(k[0]), 1);
}

TEST(Exact, Rationalize) {
  EXPECT_EQ(exact::rationalize(0.5), std::make_pair(exact::Int{1}, exact::Int{2}));
  EXPECT_EQ(exact::rationalize(-1.0 / 3.0), std::make_pair(exact::Int{-1}, exact::Int{3}));
  EXPECT_EQ(exact::rationalize(2.0), std::make_pair(exact::Int{2}, exact::Int{1}));
  EXPECT_THROW(exact::rationalize(std::sqrt(2.0), 1e-15, 100), Error);
  const auto ip = exact::integerize({vec({0.5, -0.25}), vec({1.0 / 3.0, 0.0})});
  EXPECT_EQ(ip.denominator, 12);
  EXPECT_EQ(ip.rows[0], (IntVector{6, -3}));
  EXPECT_EQ(ip.rows[1], (IntVector{4, 0}));
}

TEST(Exact, OverflowIsReported) {
  const exact::Int big = INT64_MAX / 2;
  try {
    exact::combine(4, {big, 1}, 1, {1, 0});
    FAIL() << "expected Overflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Overflow);
  }
}

TEST(DoubleDescription, Orthant) {
  const std::vector<IntVector> a{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  EXPECT_EQ(as_set(extreme_rays(a, 3)), (std::set<IntVector>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
}

TEST(DoubleDescription, ConeOverCubeAndOctahedron) {
  // Cube facets t +- x_i >= 0: rays are the 8 vertices (s, 1).
  std::vector<IntVector> cube;
  for (int i = 0; i < 3; ++i)
    for (int s : {1, -1}) {
      IntVector r(4, 0);
      r[static_cast<std::size_t>(i)] = s;
      r[3] = 1;
      cube.push_back(r);
    }
  const auto cr = extreme_rays(cube, 4);
  EXPECT_EQ(cr.size(), 8u);
  for (const auto& r : cr) {
    EXPECT_EQ(r[3], 1);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(std::abs(r[static_cast<std::size_t>(i)]), 1);
  }
  // Octahedron facets t + <s, x> >= 0: rays are the 6 vertices (+-e_i, 1).
  std::vector<IntVector> oct;
  for (int s0 : {1, -1})
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) oct.push_back({s0, s1, s2, 1});
  EXPECT_EQ(extreme_rays(oct, 4).size(), 6u);
}

TEST(DoubleDescription, MatchesBruteForceOnRandomCones) {
  Rng rng(31);
  std::uniform_int_distribution<int> coef(-3, 3);
  int compared = 0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 3 + static_cast<std::size_t>(t % 3);
    std::vector<IntVector> a;
    // Include a positive row so the cone is pointed and nontrivial more often.
    for (std::size_t i = 0; i < n + 4; ++i) {
      IntVector r(n);
      for (auto& x : r) x = coef(rng);
      r[n - 1] = std::abs(r[n - 1]) + 1;
      a.push_back(r);
    }
    if (exact::rank(a, n) < n) continue;
    const auto expected = brute_force_rays(a, n);
    EXPECT_EQ(as_set(extreme_rays(a, n)), expected);
    ++compared;
  }
  EXPECT_GT(compared, 30);
}

TEST(DoubleDescription, RejectsNonPointedCone) {
  EXPECT_THROW(extreme_rays({{1, 0, 0}, {0, 1, 0}}, 3), Error);
}

TEST(HullMargin, Examples) {
  EXPECT_NEAR(hull_margin({vec({0.5, 0.5, 0.5}), vec({-0.5, -0.5, -0.5})}), 0.0, 1e-12);
  EXPECT_NEAR(hull_margin({vec({0.5, 0.5}), vec({0.5, -0.5}), vec({-0.5, 0.5}), vec({-0.5, -0.5})}), 0.5, 1e-12);
  EXPECT_NEAR(hull_margin({vec({0.5, 0.5, 0.5})}), -std::sqrt(3.0) / 2.0, 1e-12);
}

TEST(HullMargin, OneDimensional) {
  EXPECT_NEAR(hull_margin({vec({1.0}), vec({-0.5}), vec({0.0})}), 0.5, 1e-12);
  EXPECT_NEAR(hull_margin({vec({1.0}), vec({0.5})}), -0.5, 1e-12);
  EXPECT_NEAR(hull_margin({vec({1.0}), vec({0.0})}), 0.0, 1e-12);
}

TEST(HullMargin, InteriorDepthMatchesBruteForceFacets) {
  Rng rng(32);
  std::uniform_int_distribution<int> coord(-4, 4);
  for (int t = 0; t < 30; ++t) {
    std::vector<RVector> pts;
    for (int i = 0; i < 9; ++i) pts.push_back(vec({coord(rng) / 2.0, coord(rng) / 2.0, coord(rng) / 2.0}));
    const double m = hull_margin(pts);
    // Oracle: minimum over all supporting planes through three points.
    double depth = std::numeric_limits<double>::infinity();
    bool full = affine_dimension(pts) == 3;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        for (std::size_t k = j + 1; k < pts.size(); ++k) {
          const Eigen::Vector3d nrm = (pts[j] - pts[i]).head<3>().cross((pts[k] - pts[i]).head<3>());
          if (nrm.norm() < 1e-12) continue;
          const Eigen::Vector3d u = nrm.normalized();
          double lo = 1e9, hi = -1e9;
          for (const auto& p : pts) {
            const double s = u.dot(p.head<3>() - pts[i].head<3>());
            lo = std::min(lo, s);
            hi = std::max(hi, s);
          }
          const double off = -u.dot(pts[i].head<3>());
          if (lo > -1e-12) depth = std::min(depth, off);
          if (hi < 1e-12) depth = std::min(depth, -off);
        }
    if (m > 1e-9) {
      ASSERT_TRUE(full);
      EXPECT_NEAR(m, depth, 1e-9);
    } else if (m < -1e-9) {
      // Outside: the minimum-norm point certifies the distance.
      const RVector x = min_norm_point(pts);
      EXPECT_NEAR(x.norm(), -m, 1e-12);
      for (const auto& p : pts) EXPECT_GE(x.dot(p), x.squaredNorm() - 1e-9);
    }
  }
}

TEST(MinNormPoint, SegmentAndTriangle) {
  const RVector x = min_norm_point({vec({1.0, 1.0}), vec({1.0, -1.0})});
  EXPECT_NEAR((x - vec({1.0, 0.0})).norm(), 0.0, 1e-12);
  const RVector y = min_norm_point({vec({1.0, 0.0, 0.0}), vec({0.0, 1.0, 0.0}), vec({0.0, 0.0, 1.0})});
  EXPECT_NEAR((y - vec({1.0 / 3, 1.0 / 3, 1.0 / 3})).norm(), 0.0, 1e-12);
}
