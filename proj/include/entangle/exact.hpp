#pragma once

// Small exact-integer toolkit: gcd-normalized int64 vectors with overflow-checked
// arithmetic, fraction-free elimination, and rationalization of doubles.

#include "entangle/types.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace entangle::exact {

using Int = std::int64_t;
using Wide = __int128;
using IntVector = std::vector<Int>;

inline Int narrow(Wide v) {
  constexpr Wide lo = static_cast<Wide>(INT64_MIN) + 1;
  constexpr Wide hi = static_cast<Wide>(INT64_MAX);
  if (v < lo || v > hi) throw Error(ErrorCode::Overflow, "exact integer arithmetic overflowed 64 bits");
  return static_cast<Int>(v);
}

inline Int gcd_of(const IntVector& v) {
  Int g = 0;
  for (Int x : v) g = std::gcd(g, x < 0 ? -x : x);
  return g;
}

/// Divides by the gcd of the entries; the zero vector is left alone.
inline void normalize(IntVector& v) {
  const Int g = gcd_of(v);
  if (g > 1)
    for (auto& x : v) x /= g;
}

inline bool is_zero(const IntVector& v) {
  for (Int x : v)
    if (x != 0) return false;
  return true;
}

inline Wide dot(const IntVector& a, const IntVector& b) {
  Wide s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<Wide>(a[i]) * b[i];
  return s;
}

/// a*x + b*y, gcd-normalized. Coefficients may be wide; they are reduced by their gcd first.
inline IntVector combine(Wide a, const IntVector& x, Wide b, const IntVector& y) {
  auto wabs = [](Wide v) { return v < 0 ? -v : v; };
  Wide g = wabs(a);
  for (Wide t = wabs(b); t != 0;) {
    const Wide r = g % t;
    g = t;
    t = r;
  }
  if (g > 1) {
    a /= g;
    b /= g;
  }
  std::vector<Wide> wide(x.size());
  Wide common = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    wide[i] = a * x[i] + b * y[i];
    Wide u = common, t = wabs(wide[i]);
    while (t != 0) {
      const Wide r = u % t;
      u = t;
      t = r;
    }
    common = u;
  }
  IntVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = narrow(common > 1 ? wide[i] / common : wide[i]);
  return out;
}

inline std::size_t leading_index(const IntVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0) return i;
  return v.size();
}

/// Incremental row echelon form over the integers. Rows are kept reduced against
/// every earlier row, so elimination in insertion order is exact.
class Echelon {
 public:
  explicit Echelon(std::size_t cols) : cols_(cols) {}

  /// Reduces v against the stored rows; returns the remainder.
  IntVector reduce(IntVector v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::size_t c = pivots_[i];
      if (v[c] == 0) continue;
      v = combine(rows_[i][c], v, -static_cast<Wide>(v[c]), rows_[i]);
    }
    return v;
  }

  /// Adds v if independent of the stored rows; returns whether it was added.
  bool insert(const IntVector& v) {
    IntVector r = reduce(v);
    if (is_zero(r)) return false;
    normalize(r);
    pivots_.push_back(leading_index(r));
    rows_.push_back(std::move(r));
    return true;
  }

  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  /// Basis of the null space of the stored rows.
  std::vector<IntVector> kernel() const {
    // Gauss-Jordan: clear each pivot column from every other row.
    std::vector<IntVector> rows = rows_;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t c = pivots_[i];
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (j == i || rows[j][c] == 0) continue;
        rows[j] = combine(rows[i][c], rows[j], -static_cast<Wide>(rows[j][c]), rows[i]);
      }
    }
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : pivots_) is_pivot[c] = true;
    std::vector<IntVector> out;
    for (std::size_t f = 0; f < cols_; ++f) {
      if (is_pivot[f]) continue;
      // x_f = L, x_{c_i} = -rows_i[f] * L / p_i with L the lcm of the pivots.
      Wide l = 1;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Wide p = std::abs(rows[i][pivots_[i]]);
        l = narrow(l / std::gcd(static_cast<Int>(l), static_cast<Int>(p)) * p);
      }
      IntVector x(cols_, 0);
      x[f] = narrow(l);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Int p = rows[i][pivots_[i]];
        x[pivots_[i]] = narrow(-static_cast<Wide>(rows[i][f]) * (l / p));
      }
      normalize(x);
      out.push_back(std::move(x));
    }
    return out;
  }

 private:
  std::size_t cols_;
  std::vector<IntVector> rows_;
  std::vector<std::size_t> pivots_;
};

inline std::size_t rank(const std::vector<IntVector>& rows, std::size_t cols) {
  Echelon e(cols);
  for (const auto& r : rows) e.insert(r);
  return e.rank();
}

/// Best rational approximation p/q of x with q <= max_den, by continued fractions.
inline std::pair<Int, Int> rationalize(double x, double tol = 1e-9, Int max_den = 1000000) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, "cannot rationalize a non-finite value");
  Int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    const Int ai = static_cast<Int>(a);
    const Int p2 = narrow(static_cast<Wide>(ai) * p1 + p0);
    const Int q2 = narrow(static_cast<Wide>(ai) * q1 + q0);
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol) return {p1, q1};
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  if (q1 != 0 && std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol) return {p1, q1};
  throw Error(ErrorCode::InvalidInput,
              "value " + std::to_string(x) + " has no rational approximation with denominator <= " +
                  std::to_string(max_den));
}

struct IntegerPoints {
  std::vector<IntVector> rows;
  Int denominator = 1;
};

/// Scales a list of real vectors to a common-denominator integer matrix.
inline IntegerPoints integerize(const std::vector<RVector>& pts, double tol = 1e-9) {
  Int den = 1;
  std::vector<std::vector<std::pair<Int, Int>>> fr(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (Eigen::Index k = 0; k < pts[i].size(); ++k) {
      fr[i].push_back(rationalize(pts[i](k), tol));
      den = narrow(static_cast<Wide>(den) / std::gcd(den, fr[i].back().second) * fr[i].back().second);
    }
  }
  IntegerPoints out{std::vector<IntVector>(pts.size()), den};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (const auto& [p, q] : fr[i]) out.rows[i].push_back(narrow(static_cast<Wide>(p) * (den / q)));
  return out;
}

}  // namespace entangle::exact
