#pragma once

// Hilbert-Mumford test for qubit composites and spin states: look for a frame
// (choice of Cartan subalgebra) in which zero leaves the convex hull of the
// weights carried by nonzero amplitudes.

#include "entangle/classify.hpp"
#include "entangle/hull.hpp"
#include "entangle/random.hpp"
#include "entangle/repr_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace entangle {

/// Weights carried by the nonzero amplitudes of a state in a given frame.
struct WeightSupport {
  std::vector<RVector> points;
  std::vector<Vec3> frame;
  /// Basis indices (in the rotated frame) of the retained amplitudes.
  std::vector<std::size_t> indices;
};

struct HilbertMumfordOptions {
  int starts = 64;
  std::uint64_t seed = kDefaultSeed;
  /// Boundary tolerance on the hull margin.
  double tol = 1e-7;
  /// Relative amplitude threshold for membership in the support.
  double amplitude_tol = kAmplitudeZero;
};

namespace detail {

inline void require_hm_spec(const SystemSpec& spec) {
  if (!spec.is_spin() && !spec.all_qubits()) {
    throw Error(ErrorCode::InvalidSpec,
                "Hilbert-Mumford search supports qubit composites and spin systems, got " +
                    spec.describe(),
                "system");
  }
}

/// SU(2) matrix whose rows are the bras of the +1/2 and -1/2 eigenvectors of n . sigma.
inline CMatrix frame_unitary(const Vec3& dir) {
  const Vec3 n = dir.normalized();
  const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double phi = std::atan2(n.y(), n.x());
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  CMatrix v(2, 2);
  v << c, std::polar(s, -phi), -std::polar(s, phi), c;
  return v;
}

/// Bloch direction of the +1/2 eigenvector encoded in the first row of v.
inline Vec3 frame_direction(const CMatrix& v) {
  const Complex a = std::conj(v(0, 0)), b = std::conj(v(0, 1));
  const Complex ab = std::conj(a) * b;
  return Vec3(2 * ab.real(), 2 * ab.imag(), std::norm(a) - std::norm(b)).normalized();
}

/// All weights of the representation, scaled by 2 so they are integers.
inline std::vector<exact::IntVector> doubled_weights(const SystemSpec& spec) {
  std::vector<exact::IntVector> w;
  if (spec.is_spin()) {
    for (int i = 0; i <= spec.two_j(); ++i) w.push_back({spec.two_j() - 2 * i});
    return w;
  }
  const std::size_t n = spec.num_factors();
  for (std::size_t s = 0; s < spec.total_dim(); ++s) {
    exact::IntVector v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = ((s >> (n - 1 - k)) & 1u) ? -1 : 1;
    w.push_back(v);
  }
  return w;
}

inline CVector rotate(const SystemSpec& spec, const std::vector<CMatrix>& frame, const CVector& psi) {
  return apply_group(spec, frame, psi);
}

using KillSet = std::vector<std::size_t>;

/// Minimal index sets whose vanishing puts zero outside (strict = true) or off the
/// interior (strict = false) of the weight hull, over a grid of one-parameter
/// subgroups with generic tie-breaking.
inline std::vector<KillSet> kill_sets(const SystemSpec& spec, bool strict) {
  const auto w = doubled_weights(spec);
  const std::size_t dim = w[0].size();
  const int radius = dim <= 3 ? 3 : (dim <= 5 ? 2 : 1);

  std::vector<std::vector<double>> cs;
  std::vector<int> c(dim, -radius);
  for (;;) {
    bool nonzero = false;
    for (int x : c) nonzero = nonzero || x != 0;
    if (nonzero) cs.emplace_back(c.begin(), c.end());
    std::size_t k = 0;
    while (k < dim && c[k] == radius) c[k++] = -radius;
    if (k == dim) break;
    ++c[k];
  }
  Rng rng(7);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> g(dim);
    for (auto& x : g) x = normal(rng);
    cs.push_back(g);
  }
  std::vector<std::vector<double>> ties;
  for (int t = 0; t < (strict ? 4 : 0); ++t) {
    std::vector<double> g(dim);
    for (auto& x : g) x = normal(rng);
    ties.push_back(g);
  }
  if (!strict) ties.push_back(std::vector<double>(dim, 0.0));

  auto pair = [&](const std::vector<double>& a, const exact::IntVector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += a[i] * static_cast<double>(b[i]);
    return s;
  };
  std::set<KillSet> found;
  for (const auto& cv : cs) {
    for (const auto& d : ties) {
      KillSet k;
      for (std::size_t s = 0; s < w.size(); ++s) {
        const double v = pair(cv, w[s]);
        const bool tie = std::abs(v) < 1e-9;
        if (strict ? (v < -1e-9 || (tie && pair(d, w[s]) <= 1e-12)) : v < -1e-9) k.push_back(s);
      }
      if (!k.empty()) found.insert(k);
    }
  }
  std::vector<KillSet> all(found.begin(), found.end());
  std::sort(all.begin(), all.end(), [](const KillSet& a, const KillSet& b) { return a.size() < b.size(); });
  std::vector<KillSet> minimal;
  for (const auto& k : all) {
    bool dominated = false;
    for (const auto& m : minimal) {
      if (std::includes(k.begin(), k.end(), m.begin(), m.end())) {
        dominated = true;
        break;
      }
    }
    if (!dominated) minimal.push_back(k);
  }
  return minimal;
}

struct FrameObjective {
  double mass = std::numeric_limits<double>::infinity();
  std::size_t set = 0;
};

inline FrameObjective frame_objective(const SystemSpec& spec, const std::vector<CMatrix>& frame,
                                      const CVector& psi, const std::vector<KillSet>& sets) {
  const CVector a = rotate(spec, frame, psi);
  FrameObjective best;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    double m = 0.0;
    for (auto s : sets[i]) m += std::norm(a(static_cast<Eigen::Index>(s)));
    if (m < best.mass) best = {m, i};
  }
  return best;
}

/// Small rotation exp(-i (alpha sigma_x + beta sigma_y) / 2).
inline CMatrix tilt(double alpha, double beta) {
  const double r = std::hypot(alpha, beta);
  CMatrix g = CMatrix::Identity(2, 2);
  if (r == 0.0) return g;
  const Complex i{0.0, 1.0};
  CMatrix n(2, 2);
  n << 0.0, Complex(alpha / r, -beta / r), Complex(alpha / r, beta / r), 0.0;
  return std::cos(r / 2) * g - i * std::sin(r / 2) * n;
}

/// Levenberg-Marquardt on the amplitudes of one kill set, driving them to zero.
inline void polish(const SystemSpec& spec, std::vector<CMatrix>& frame, const CVector& psi,
                   const KillSet& set) {
  const auto np = static_cast<Eigen::Index>(2 * frame.size());
  const auto nr = static_cast<Eigen::Index>(2 * set.size());
  auto residual = [&](const std::vector<CMatrix>& f) {
    const CVector a = rotate(spec, f, psi);
    RVector r(nr);
    for (std::size_t i = 0; i < set.size(); ++i) {
      r(2 * i) = a(static_cast<Eigen::Index>(set[i])).real();
      r(2 * i + 1) = a(static_cast<Eigen::Index>(set[i])).imag();
    }
    return r;
  };
  auto moved = [&](const RVector& delta) {
    std::vector<CMatrix> f = frame;
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = tilt(delta(2 * k), delta(2 * k + 1)) * f[k];
    return f;
  };
  double lambda = 1e-3;
  RVector r = residual(frame);
  for (int it = 0; it < 100 && r.squaredNorm() > 1e-30; ++it) {
    RMatrix j(nr, np);
    const double h = 1e-7;
    for (Eigen::Index p = 0; p < np; ++p) {
      RVector e = RVector::Zero(np);
      e(p) = h;
      j.col(p) = (residual(moved(e)) - residual(moved(-e))) / (2 * h);
    }
    const RMatrix jtj = j.transpose() * j;
    const RVector g = j.transpose() * r;
    bool accepted = false;
    for (int tries = 0; tries < 20; ++tries) {
      RMatrix lhs = jtj;
      lhs.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
      const RVector delta = -lhs.ldlt().solve(g);
      auto cand = moved(delta);
      const RVector rc = residual(cand);
      if (rc.squaredNorm() < r.squaredNorm()) {
        frame = std::move(cand);
        r = rc;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
  }
}

struct SearchResult {
  std::vector<CMatrix> frame;
  double mass = std::numeric_limits<double>::infinity();
};

/// Multi-start local search for a frame minimizing the mass on some kill set.
inline SearchResult search_frames(const QuantumState& state, const std::vector<KillSet>& sets,
                                  const HilbertMumfordOptions& opts) {
  const auto& spec = state.spec();
  const CVector& psi = state.amplitudes();
  const std::size_t sites = spec.is_spin() ? 1 : spec.num_factors();
  const double done = 1e-26;

  std::vector<std::vector<CMatrix>> seeds;
  seeds.emplace_back(sites, CMatrix::Identity(2, 2));
  if (!spec.is_spin()) {
    std::vector<CMatrix> bloch;
    for (std::size_t k = 0; k < sites; ++k) {
      const CMatrix rho = reduced_density(psi, spec.factors(), k);
      Vec3 n(2 * rho(0, 1).real(), -2 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real());
      bloch.push_back(n.norm() > 1e-12 ? frame_unitary(n) : CMatrix(CMatrix::Identity(2, 2)));
    }
    seeds.push_back(bloch);
  }

  SearchResult best;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int start = 0; start < opts.starts; ++start) {
    Rng rng(opts.seed + static_cast<std::uint64_t>(start));
    std::vector<CMatrix> frame;
    if (static_cast<std::size_t>(start) < seeds.size()) {
      frame = seeds[static_cast<std::size_t>(start)];
    } else {
      for (std::size_t k = 0; k < sites; ++k) frame.push_back(random_unitary(rng, 2));
    }
    auto f = frame_objective(spec, frame, psi, sets);
    for (double radius = 0.6; radius > 1e-3 && f.mass > done;) {
      bool improved = false;
      for (std::size_t k = 0; k < sites; ++k) {
        for (int t = 0; t < 4; ++t) {
          auto cand = frame;
          cand[k] = tilt(radius * normal(rng), radius * normal(rng)) * cand[k];
          const auto fc = frame_objective(spec, cand, psi, sets);
          if (fc.mass < f.mass) {
            frame = std::move(cand);
            f = fc;
            improved = true;
          }
        }
      }
      if (!improved) radius *= 0.5;
    }
    if (f.mass > done && f.mass < 1e-2) {
      polish(spec, frame, psi, sets[f.set]);
      f = frame_objective(spec, frame, psi, sets);
    }
    if (f.mass < best.mass) best = {frame, f.mass};
    if (best.mass <= done) break;
  }
  return best;
}

inline WeightSupport support_in(const QuantumState& state, const std::vector<CMatrix>& frame,
                                double amplitude_tol) {
  const auto& spec = state.spec();
  const CVector a = rotate(spec, frame, state.amplitudes());
  const double cutoff = amplitude_tol * a.cwiseAbs().maxCoeff();
  const auto w = doubled_weights(spec);
  WeightSupport out;
  for (const auto& f : frame) out.frame.push_back(frame_direction(f));
  for (std::size_t s = 0; s < w.size(); ++s) {
    if (std::abs(a(static_cast<Eigen::Index>(s))) <= cutoff) continue;
    RVector p(static_cast<Eigen::Index>(w[s].size()));
    for (std::size_t k = 0; k < w[s].size(); ++k) p(static_cast<Eigen::Index>(k)) = 0.5 * static_cast<double>(w[s][k]);
    out.points.push_back(p);
    out.indices.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Weight support of a state in the frame given by one unit direction per qubit
/// (or a single direction for a spin). Qubit weights are +-1/2 per site, +1/2 along
/// the direction; spin weights are mu = j ... -j.
inline WeightSupport support(const QuantumState& state, const std::vector<Vec3>& frame,
                             double amplitude_tol = kAmplitudeZero) {
  const auto& spec = state.spec();
  detail::require_hm_spec(spec);
  const std::size_t sites = spec.is_spin() ? 1 : spec.num_factors();
  if (frame.size() != sites) {
    throw Error(ErrorCode::DimensionMismatch,
                "frame has " + std::to_string(frame.size()) + " directions, expected " + std::to_string(sites),
                "frame");
  }
  std::vector<CMatrix> us;
  for (const auto& n : frame) {
    if (!(n.norm() > 0.0)) throw Error(ErrorCode::InvalidInput, "frame direction must be nonzero", "frame");
    us.push_back(detail::frame_unitary(n));
  }
  auto out = detail::support_in(state, us, amplitude_tol);
  out.frame = frame;
  for (auto& n : out.frame) n.normalize();
  return out;
}

inline double hull_margin(const WeightSupport& supp) { return hull_margin(supp.points); }

/// Searches frames for a destabilizing one-parameter subgroup. Unstable when some frame
/// puts zero outside the weight hull; otherwise Semistable, flagged stable when zero
/// stays strictly inside in every frame found.
inline StabilityVerdict stability_search(const QuantumState& state, const HilbertMumfordOptions& opts = {}) {
  const auto& spec = state.spec();
  detail::require_hm_spec(spec);
  const auto basis = build_basis(spec);
  const auto rep = representation_data(spec, basis);

  StabilityVerdict v;
  v.method = Method::HilbertMumford;
  v.tolerance = opts.tol;
  v.moment_norm = moment_norm(state, basis);
  v.variance = total_variance(state, basis, rep);

  const auto strict = detail::kill_sets(spec, true);
  const auto unstable = detail::search_frames(state, strict, opts);
  auto supp = detail::support_in(state, unstable.frame, opts.amplitude_tol);
  double margin = hull_margin(supp.points);
  std::vector<Vec3> frame = supp.frame;

  if (margin >= -opts.tol) {
    const auto boundary = detail::search_frames(state, detail::kill_sets(spec, false), opts);
    auto bsupp = detail::support_in(state, boundary.frame, opts.amplitude_tol);
    const double bm = hull_margin(bsupp.points);
    if (bm < margin) {
      margin = bm;
      frame = bsupp.frame;
    }
  }

  v.margin = margin;
  v.certificate_frame = frame;
  if (margin < -opts.tol) {
    v.cls = StabilityClass::Unstable;
  } else if (unstable.mass < 1e-12) {
    v.cls = StabilityClass::Inconclusive;
    v.note = "kill-set mass " + std::to_string(unstable.mass) + " is in the numerical gray zone";
  } else {
    v.cls = StabilityClass::Semistable;
    v.stable = margin > opts.tol;
  }
  return v;
}

}  // namespace entangle
