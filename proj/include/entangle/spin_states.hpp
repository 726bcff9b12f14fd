#pragma once

// Spin-j states as binary forms: polygon construction, Majorana-style roots on the
// sphere, discriminant and catalecticant.

#include "entangle/random.hpp"
#include "entangle/repr_core.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace entangle {

/// 2j unit vectors whose sum should vanish.
struct PolygonString {
  std::vector<Vec3> vectors;
  double closure_residual = 0.0;
};

inline PolygonString make_polygon(std::vector<Vec3> vectors) {
  if (vectors.empty()) throw Error(ErrorCode::InvalidInput, "polygon needs at least one vector", "vectors");
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (std::abs(vectors[i].norm() - 1.0) > 1e-9) {
      throw Error(ErrorCode::InvalidInput,
                  "vector " + std::to_string(i) + " has length " + std::to_string(vectors[i].norm()) +
                      ", expected 1",
                  "vectors");
    }
    sum += vectors[i];
  }
  return PolygonString{std::move(vectors), sum.norm()};
}

/// Random closed polygon of n unit vectors: subtract the mean and renormalize until closed.
inline PolygonString random_polygon(Rng& rng, int n) {
  if (n < 2) throw Error(ErrorCode::InvalidInput, "a closed polygon needs at least two sides", "vectors");
  std::vector<Vec3> v;
  for (int i = 0; i < n; ++i) v.push_back(random_unit_vector(rng));
  for (int it = 0; it < 100000; ++it) {
    Vec3 mean = Vec3::Zero();
    for (const auto& p : v) mean += p;
    if (mean.norm() <= 1e-12) break;
    mean /= static_cast<double>(n);
    for (auto& p : v) {
      p -= mean;
      if (p.norm() < 1e-6) p = random_unit_vector(rng);
      p.normalize();
    }
  }
  auto poly = make_polygon(std::move(v));
  if (poly.closure_residual > 1e-10) return random_polygon(rng, n);
  return poly;
}

/// Coefficients a_mu, stored by k = j + mu, of f(x, y) = sum a_mu C(2j, j+mu) x^(j+mu) y^(j-mu).
struct BinaryForm {
  int two_j = 0;
  std::vector<Complex> a;

  /// Polynomial coefficient of x^k y^(2j-k).
  Complex coefficient(int k) const { return a[static_cast<std::size_t>(k)] * binomial(two_j, k); }
};

inline BinaryForm binary_form(const QuantumState& state) {
  if (!state.spec().is_spin()) {
    throw Error(ErrorCode::InvalidSpec, "binary forms are defined for spin systems", "system");
  }
  const int n = state.spec().two_j();
  BinaryForm f{n, std::vector<Complex>(static_cast<std::size_t>(n + 1))};
  for (int k = 0; k <= n; ++k) {
    // |mu> with mu = k - j sits at index j - mu = n - k.
    f.a[static_cast<std::size_t>(k)] = state.amplitudes()(n - k) / std::sqrt(binomial(n, k));
  }
  return f;
}

inline QuantumState state_from_form(const BinaryForm& f) {
  const int n = f.two_j;
  CVector amps(n + 1);
  for (int k = 0; k <= n; ++k) amps(n - k) = f.a[static_cast<std::size_t>(k)] * std::sqrt(binomial(n, k));
  return QuantumState(SystemSpec::spin(n), amps);
}

namespace detail {

inline bool is_north_pole(const Vec3& p) { return p.z() > 1.0 - 1e-12 && std::hypot(p.x(), p.y()) < 1e-6; }

/// Stereographic projection from the north pole.
inline Complex stereographic(const Vec3& p) {
  return Complex(p.x(), p.y()) / (1.0 - p.z());
}

inline Vec3 inverse_stereographic(Complex z) {
  const double r2 = std::norm(z);
  return Vec3(2 * z.real(), 2 * z.imag(), r2 - 1.0) / (r2 + 1.0);
}

/// Global phase fixed so the largest-magnitude amplitude is real and positive.
inline CVector fix_phase(CVector v) {
  Eigen::Index big = 0;
  v.cwiseAbs().maxCoeff(&big);
  const Complex ph = v(big) / std::abs(v(big));
  return v / ph;
}

inline Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex s = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * z + c[i];
  return s;
}

/// Roots of sum c_k z^k (c.back() != 0) by companion-matrix eigenvalues, Newton-polished.
inline std::vector<Complex> polynomial_roots(std::vector<Complex> c) {
  const std::size_t deg = c.size() - 1;
  std::vector<Complex> roots;
  if (deg == 0) return roots;
  const Complex lead = c.back();
  for (auto& x : c) x /= lead;
  CMatrix comp = CMatrix::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
  for (std::size_t i = 1; i < deg; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) = -c[i];
  // Balance rows and columns by powers of two before the eigen-solve.
  for (int sweep = 0; sweep < 20; ++sweep) {
    bool changed = false;
    for (Eigen::Index i = 0; i < comp.rows(); ++i) {
      const double col = comp.col(i).cwiseAbs().sum() - std::abs(comp(i, i));
      const double row = comp.row(i).cwiseAbs().sum() - std::abs(comp(i, i));
      if (col == 0.0 || row == 0.0) continue;
      const double f = std::exp2(std::round(std::log2(std::sqrt(row / col))));
      if (f != 1.0 && std::abs(f - 1.0) > 1e-3) {
        comp.col(i) *= f;
        comp.row(i) /= f;
        changed = true;
      }
    }
    if (!changed) break;
  }
  Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
  std::vector<Complex> rev(c.rbegin(), c.rend());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    Complex z = es.eigenvalues()(i);
    for (int it = 0; it < 20; ++it) {
      // Newton on p(z), or on the reversed polynomial in w = 1/z when |z| > 1.
      if (std::abs(z) <= 1.0) {
        Complex p = 0.0, dp = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) {
          dp = dp * z + p;
          p = p * z + c[k];
        }
        if (dp == Complex(0.0)) break;
        const Complex step = p / dp;
        z -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
      } else {
        Complex w = 1.0 / z, p = 0.0, dp = 0.0;
        for (std::size_t k = rev.size(); k-- > 0;) {
          dp = dp * w + p;
          p = p * w + rev[k];
        }
        if (dp == Complex(0.0)) break;
        const Complex step = p / dp;
        w -= step;
        z = 1.0 / w;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(w))) break;
      }
    }
    roots.push_back(z);
  }
  return roots;
}

}  // namespace detail

/// The state whose binary form has the stereographic images of the polygon's vectors as
/// roots. A north-pole vector is a root at infinity and lowers the degree in z by one.
inline QuantumState polygon_to_state(const PolygonString& p) {
  if (p.closure_residual > 1e-9) {
    throw Error(ErrorCode::NotClosed,
                "polygon does not close: |sum p_i| = " + std::to_string(p.closure_residual), "vectors");
  }
  const int n = static_cast<int>(p.vectors.size());
  std::vector<Complex> poly{1.0};
  for (const auto& v : p.vectors) {
    // Multiply by (z - zeta), or by 1 for a root at infinity (homogeneous factor y).
    if (detail::is_north_pole(v)) continue;
    const Complex zeta = detail::stereographic(v);
    std::vector<Complex> next(poly.size() + 1, 0.0);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k + 1] += poly[k];
      next[k] -= zeta * poly[k];
    }
    poly = std::move(next);
  }
  poly.resize(static_cast<std::size_t>(n + 1), 0.0);
  CVector amps(n + 1);
  for (int k = 0; k <= n; ++k) amps(n - k) = poly[static_cast<std::size_t>(k)] / std::sqrt(binomial(n, k));
  return QuantumState(SystemSpec::spin(n), detail::fix_phase(amps.normalized()));
}

/// Points on the sphere whose stereographic images are the roots of the state's form.
inline std::vector<Vec3> state_to_roots(const QuantumState& state) {
  const BinaryForm f = binary_form(state);
  const int n = f.two_j;
  std::vector<Complex> c(static_cast<std::size_t>(n + 1));
  double scale = 0.0;
  for (int k = 0; k <= n; ++k) {
    c[static_cast<std::size_t>(k)] = f.coefficient(k);
    scale = std::max(scale, std::abs(c[static_cast<std::size_t>(k)]));
  }
  if (scale == 0.0) throw Error(ErrorCode::ZeroPolynomial, "all coefficients vanish");
  const double cutoff = 1e-13 * scale;

  std::vector<Vec3> out;
  int top = n;
  while (std::abs(c[static_cast<std::size_t>(top)]) <= cutoff) {
    out.push_back(Vec3::UnitZ());
    --top;
  }
  int low = 0;
  while (std::abs(c[static_cast<std::size_t>(low)]) <= cutoff) {
    out.push_back(-Vec3::UnitZ());
    ++low;
  }
  std::vector<Complex> core(c.begin() + low, c.begin() + top + 1);
  for (const auto& z : detail::polynomial_roots(core)) out.push_back(detail::inverse_stereographic(z));
  return out;
}

/// Discriminant of the degree-2j form: (-1)^(n(n-1)/2) Res(f_x, f_y) / n^(n-2), which
/// vanishes exactly when the form has a repeated linear factor (including at infinity).
inline Complex discriminant(const BinaryForm& f) {
  const int n = f.two_j;
  if (n < 2) throw Error(ErrorCode::InvalidInput, "discriminant needs degree >= 2", "form");
  bool zero = true;
  for (const auto& x : f.a) zero = zero && x == Complex(0.0);
  if (zero) throw Error(ErrorCode::ZeroPolynomial, "all coefficients vanish");

  // Coefficients of f_x and f_y as degree n-1 forms, highest power of x first.
  const int m = n - 1;
  std::vector<Complex> fx(static_cast<std::size_t>(n)), fy(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int kx = n - i;  // x^(n-1-i) y^i in f_x comes from x^(n-i) y^i in f
    fx[static_cast<std::size_t>(i)] = static_cast<double>(kx) * f.coefficient(kx);
    const int ky = n - 1 - i;  // x^(n-1-i) y^i in f_y comes from x^(n-1-i) y^(i+1)
    fy[static_cast<std::size_t>(i)] = static_cast<double>(n - ky) * f.coefficient(ky);
  }
  CMatrix s = CMatrix::Zero(2 * m, 2 * m);
  for (int r = 0; r < m; ++r)
    for (int i = 0; i < n; ++i) {
      s(r, r + i) = fx[static_cast<std::size_t>(i)];
      s(m + r, r + i) = fy[static_cast<std::size_t>(i)];
    }
  const Complex res = m > 0 ? s.determinant() : Complex(1.0);
  const double sign = ((n * (n - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  return sign * res / std::pow(static_cast<double>(n), n - 2);
}

/// Determinant of the (j+1)x(j+1) Hankel matrix with (r, c) entry a_(j - r - c).
inline Complex catalecticant(const BinaryForm& f) {
  if (f.two_j % 2 != 0) {
    throw Error(ErrorCode::HalfIntegerSpin, "catalecticant is defined for integer spin only", "system");
  }
  const int j = f.two_j / 2;
  CMatrix h(j + 1, j + 1);
  for (int r = 0; r <= j; ++r)
    for (int c = 0; c <= j; ++c) {
      const int mu = j - r - c;
      h(r, c) = f.a[static_cast<std::size_t>(mu + j)];
    }
  return h.determinant();
}

/// Roots grouped by coincidence on the sphere; returns the largest multiplicity.
inline int max_root_multiplicity(const std::vector<Vec3>& roots, double tol = 1e-6) {
  int best = 0;
  for (const auto& r : roots) {
    int c = 0;
    for (const auto& s : roots) c += (r - s).norm() < tol ? 1 : 0;
    best = std::max(best, c);
  }
  return best;
}

/// Hausdorff distance between two point multisets on the sphere.
inline double hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto one_way = [](const std::vector<Vec3>& p, const std::vector<Vec3>& q) {
    double worst = 0.0;
    for (const auto& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : q) best = std::min(best, (x - y).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

/// SVG figure: the polygon drawn as a closed path (projected on the x-y plane) and the
/// root constellation on the unit disc (upper hemisphere filled, lower hollow).
inline std::string polygon_svg(const std::vector<Vec3>& vectors, const std::vector<Vec3>& roots) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  const double size = 240.0, half = size / 2;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << 2 * size << ' ' << size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Left: polygon path, scaled to fit.
  std::vector<Vec3> path{Vec3::Zero()};
  for (const auto& v : vectors) path.push_back(path.back() + v);
  double extent = 1.0;
  for (const auto& p : path) extent = std::max({extent, std::abs(p.x()), std::abs(p.y())});
  const double s = 0.4 * size / extent;
  os << "<text x=\"8\" y=\"16\" font-family=\"sans-serif\" font-size=\"12\">polygon (x-y)</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"";
  for (const auto& p : path) os << half + s * p.x() << ',' << half - s * p.y() << ' ';
  os << "\"/>\n";
  for (const auto& p : path)
    os << "<circle cx=\"" << half + s * p.x() << "\" cy=\"" << half - s * p.y() << "\" r=\"2.5\" fill=\"#1f4e79\"/>\n";

  // Right: roots on the sphere, orthographic view from +z.
  const double cx = size + half, r = 0.4 * size;
  os << "<text x=\"" << size + 8 << "\" y=\"16\" font-family=\"sans-serif\" font-size=\"12\">roots (view from +z)</text>\n";
  os << "<circle cx=\"" << cx << "\" cy=\"" << half << "\" r=\"" << r << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (const auto& p : roots) {
    const bool upper = p.z() >= 0.0;
    os << "<circle cx=\"" << cx + r * p.x() << "\" cy=\"" << half - r * p.y() << "\" r=\"4\" fill=\""
       << (upper ? "#b22222" : "white") << "\" stroke=\"#b22222\" stroke-width=\"1.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace entangle
