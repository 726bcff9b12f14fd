#pragma once

#include "entangle/classify.hpp"
#include "entangle/random.hpp"
#include "entangle/repr_core.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace entangle {

/// Element of the complexified group: one SL(n_k) matrix per factor, or a single
/// SL(2) matrix for a spin system (acting through the irrep).
struct GroupElement {
  std::vector<CMatrix> factors;

  static GroupElement identity(const SystemSpec& spec) {
    GroupElement g;
    if (spec.is_spin()) {
      g.factors.push_back(CMatrix::Identity(2, 2));
    } else {
      for (int n : spec.factors()) g.factors.push_back(CMatrix::Identity(n, n));
    }
    return g;
  }

  /// Matrix of the element on the full representation space.
  CMatrix full(const SystemSpec& spec) const {
    if (spec.is_spin()) return spin_irrep(factors.at(0), spec.two_j());
    CMatrix out = CMatrix::Identity(1, 1);
    for (const auto& f : factors) out = kron(out, f);
    return out;
  }

  CVector apply(const SystemSpec& spec, const CVector& psi) const {
    return apply_group(spec, factors, psi);
  }
};

enum class MinimizationStatus { Converged, NullCone, MaxIters };

inline std::string_view to_string(MinimizationStatus s) {
  switch (s) {
    case MinimizationStatus::Converged: return "Converged";
    case MinimizationStatus::NullCone: return "NullCone";
    case MinimizationStatus::MaxIters: return "MaxIters";
  }
  return "Unknown";
}

struct KempfNessOptions {
  double eps_mm = 1e-9;    // moment-norm convergence threshold
  double eps_null = 1e-8;  // norm^2 (relative to start) below which the orbit reaches zero
  int max_iters = 20000;
  std::uint64_t seed = kDefaultSeed;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  int stall_window = 500;
  double ce_tol = kDefaultMomentTol;
};

struct MinimizationResult {
  MinimizationStatus status = MinimizationStatus::MaxIters;
  GroupElement g;
  CVector minimal_vector;  // g psi for the unit input psi; not normalized
  double minimal_norm_sq = 1.0;
  double final_moment_norm = 0.0;
  double initial_moment_norm = 0.0;
  int iterations = 0;
  /// log ||g psi||^2 after every accepted step, starting with 0.
  std::vector<double> log_norm_history;
  std::string note;
};

/// exp(s H) for Hermitian H.
inline CMatrix exp_hermitian(const CMatrix& h, double s = 1.0) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const RVector e = (s * es.eigenvalues().array()).exp();
  return es.eigenvectors() * e.asDiagonal() * es.eigenvectors().adjoint();
}

namespace detail {

/// Hermitian step directions -sum_a m_a X_a, one per factor (2x2 for spin).
inline std::vector<CMatrix> descent_directions(const ObservableBasis& basis, const RVector& m) {
  const auto& spec = basis.spec();
  std::vector<CMatrix> dirs;
  if (spec.is_spin()) {
    const auto sigma_half = su_n_generators(2);
    CMatrix h = CMatrix::Zero(2, 2);
    for (int a = 0; a < 3; ++a) h -= m(a) * sigma_half[a];
    dirs.push_back(h);
    return dirs;
  }
  for (int n : spec.factors()) dirs.push_back(CMatrix::Zero(n, n));
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const auto& op = basis.operators()[a];
    dirs[op.factor] -= m(a) * op.local;
  }
  return dirs;
}

}  // namespace detail

/// Gradient descent of log ||g psi||^2 over the positive (Hermitian) directions of the
/// complexified group, with backtracking line search.
inline MinimizationResult minimize_orbit_norm(const QuantumState& state, const ObservableBasis& basis,
                                              const KempfNessOptions& opts = {}) {
  detail::check_basis(state, basis);
  const auto& spec = basis.spec();

  MinimizationResult res;
  res.g = GroupElement::identity(spec);
  CVector unit = state.amplitudes();
  double log_norm = 0.0;
  res.log_norm_history.push_back(0.0);
  std::vector<double> moment_history;
  const double log_null = std::log(opts.eps_null);

  auto finish = [&](MinimizationStatus status, double mn) {
    res.status = status;
    res.final_moment_norm = mn;
    res.minimal_norm_sq = std::exp(log_norm);
    res.minimal_vector = std::sqrt(res.minimal_norm_sq) * unit;
    return res;
  };

  for (int it = 0;; ++it) {
    const RVector m = moment_vector(unit, basis);
    const double mn = m.norm();
    if (it == 0) res.initial_moment_norm = mn;
    res.iterations = it;
    moment_history.push_back(mn);

    if (mn <= opts.eps_mm) return finish(MinimizationStatus::Converged, mn);
    if (log_norm <= log_null) return finish(MinimizationStatus::NullCone, mn);
    if (it >= opts.max_iters) {
      res.note = "iteration limit reached";
      return finish(MinimizationStatus::MaxIters, mn);
    }

    // Geometric decay of the norm while the moment stays bounded away from zero.
    const int w = opts.stall_window;
    if (w > 1 && it >= w) {
      const auto n_hist = res.log_norm_history.size();
      const double drop_total = res.log_norm_history[n_hist - 1 - w] - log_norm;
      const double drop_late = res.log_norm_history[n_hist - 1 - w / 2] - log_norm;
      double min_moment = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= w; ++k) min_moment = std::min(min_moment, moment_history[it - k]);
      if (min_moment > 1e-4 && drop_total > 5.0 && drop_late > 0.4 * (drop_total - drop_late)) {
        res.note = "geometric norm decay with moment bounded away from zero";
        return finish(MinimizationStatus::NullCone, mn);
      }
    }

    const auto dirs = detail::descent_directions(basis, m);
    const double slope = -2.0 * mn * mn;
    // Near the minimum the norm change drops to double resolution, so the line search
    // switches to minimizing the moment norm along the ray.
    const bool precise = -opts.initial_step * slope < 1e-10;
    auto trial = [&](double step) {
      std::vector<CMatrix> exps;
      exps.reserve(dirs.size());
      for (const auto& h : dirs) exps.push_back(exp_hermitian(h, step));
      CVector cand = apply_group(spec, exps, unit);
      const double cand_log = log_norm + std::log(cand.squaredNorm());
      return std::make_tuple(std::move(exps), std::move(cand), cand_log);
    };
    bool accepted = false;
    auto accept = [&](std::vector<CMatrix>& exps, const CVector& cand, double cand_log) {
      for (std::size_t k = 0; k < exps.size(); ++k) res.g.factors[k] = exps[k] * res.g.factors[k];
      unit = cand.normalized();
      log_norm = cand_log;
      res.log_norm_history.push_back(log_norm);
      accepted = true;
    };
    if (precise) {
      double best = mn;
      std::optional<decltype(trial(0.0))> best_trial;
      for (double step = opts.initial_step; step > 1e-14; step *= opts.shrink) {
        auto t = trial(step);
        if (std::get<2>(t) > log_norm + 1e-14) continue;
        const double cm = moment_vector(CVector(std::get<1>(t).normalized()), basis).norm();
        if (cm < best) {
          best = cm;
          best_trial = std::move(t);
        } else if (best_trial) {
          break;
        }
      }
      if (best_trial) accept(std::get<0>(*best_trial), std::get<1>(*best_trial), std::get<2>(*best_trial));
    } else {
      for (double step = opts.initial_step; step > 1e-14; step *= opts.shrink) {
        auto [exps, cand, cand_log] = trial(step);
        if (cand_log <= log_norm + opts.armijo * step * slope) {
          accept(exps, cand, cand_log);
          break;
        }
      }
    }
    if (!accepted) {
      res.note = "line search stalled";
      return finish(MinimizationStatus::MaxIters, mn);
    }
  }
}

/// Positive Hermitian unit-trace matrix.
struct DensityMatrix {
  CMatrix matrix;

  RVector eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix);
    return es.eigenvalues();
  }
};

inline DensityMatrix normalized_gram(const CMatrix& g) {
  const CMatrix gg = g.adjoint() * g;
  return DensityMatrix{gg / gg.trace().real()};
}

/// rho = g^dagger g / tr(g^dagger g) for the minimizing group element.
inline DensityMatrix density_matrix(const MinimizationResult& result, const SystemSpec& spec) {
  if (result.status != MinimizationStatus::Converged) {
    throw Error(ErrorCode::NotSemistable,
                std::string("density matrix needs a converged minimization, status is ") +
                    std::string(to_string(result.status)));
  }
  return normalized_gram(result.g.full(spec));
}

/// Per-factor density matrices g_k^dagger g_k / tr; their tensor product is the full rho.
inline std::vector<DensityMatrix> factor_density_matrices(const MinimizationResult& result) {
  if (result.status != MinimizationStatus::Converged) {
    throw Error(ErrorCode::NotSemistable, "density matrix needs a converged minimization");
  }
  std::vector<DensityMatrix> out;
  for (const auto& f : result.g.factors) out.push_back(normalized_gram(f));
  return out;
}

/// Von Neumann entropy in the given logarithm base; 0 log 0 is taken as 0.
inline double entanglement_entropy(const DensityMatrix& rho, double base = 2.0) {
  const RVector ev = rho.eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double l = ev(i);
    if (l > 0.0) s -= l * std::log(l);
  }
  return s / std::log(base);
}

struct CheckedDensity {
  DensityMatrix rho;
  bool degenerate = false;
  double discrepancy = 0.0;
};

/// Density matrix cross-checked against a second minimization started from a random
/// complex-group translate. A discrepancy above 1e-5 flags a continuous symmetry.
inline CheckedDensity density_matrix_checked(const QuantumState& state, const ObservableBasis& basis,
                                             const KempfNessOptions& opts = {}) {
  const auto& spec = state.spec();
  const auto first = minimize_orbit_norm(state, basis, opts);
  CheckedDensity out{density_matrix(first, spec), false, 0.0};

  Rng rng(opts.seed);
  GroupElement h;
  if (spec.is_spin()) {
    h.factors.push_back(random_sl(rng, 2, 0.3));
  } else {
    for (int n : spec.factors()) h.factors.push_back(random_sl(rng, n, 0.3));
  }
  const QuantumState moved(spec, h.apply(spec, state.amplitudes()));
  const auto second = minimize_orbit_norm(moved, basis, opts);
  if (second.status != MinimizationStatus::Converged) return out;

  GroupElement total;
  for (std::size_t k = 0; k < h.factors.size(); ++k) {
    total.factors.push_back(second.g.factors[k] * h.factors[k]);
  }
  const DensityMatrix other = normalized_gram(total.full(spec));
  out.discrepancy = (other.matrix - out.rho.matrix).cwiseAbs().maxCoeff();
  out.degenerate = out.discrepancy > 1e-5;
  return out;
}

/// Kempf-Ness verdict: a converged flow means a closed orbit in the closure (semistable),
/// reaching the null cone means unstable.
inline StabilityVerdict semistability(const QuantumState& state, const ObservableBasis& basis,
                                      const RepresentationData& rep, const KempfNessOptions& opts = {}) {
  const auto result = minimize_orbit_norm(state, basis, opts);
  StabilityVerdict v;
  v.method = Method::KempfNess;
  v.tolerance = opts.eps_mm;
  v.moment_norm = result.initial_moment_norm;
  v.variance = total_variance(state, basis, rep);
  v.margin = result.minimal_norm_sq;
  switch (result.status) {
    case MinimizationStatus::Converged:
      v.cls = result.initial_moment_norm <= opts.ce_tol ? StabilityClass::CompletelyEntangled
                                                       : StabilityClass::Semistable;
      break;
    case MinimizationStatus::NullCone:
      v.cls = StabilityClass::Unstable;
      break;
    case MinimizationStatus::MaxIters:
      v.cls = StabilityClass::Inconclusive;
      v.note = result.note;
      break;
  }
  return v;
}

}  // namespace entangle
