#pragma once

// Marginal problem and the Kellerer cone: classical feasibility with dual
// certificates, extremal inequality enumeration up to symmetry, quantum values, and
// the five-reflection pentagon.

#include "entangle/double_description.hpp"
#include "entangle/exact.hpp"
#include "entangle/random.hpp"
#include "entangle/simplex.hpp"
#include "entangle/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace entangle {

struct BellScenario {
  std::vector<CMatrix> observables;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> spectra;                // sorted distinct eigenvalues
  std::vector<std::vector<CMatrix>> projectors;            // spectral projector per eigenvalue
  std::vector<std::vector<std::size_t>> commuting_subsets;

  std::size_t size() const noexcept { return observables.size(); }

  std::size_t joint_size() const {
    std::size_t n = 1;
    for (const auto& s : spectra) n *= s.size();
    return n;
  }

  /// Mixed-radix digits of a joint index; observable 0 is the most significant.
  std::vector<std::size_t> decode(std::size_t idx) const {
    std::vector<std::size_t> out(spectra.size());
    for (std::size_t i = spectra.size(); i-- > 0;) {
      out[i] = idx % spectra[i].size();
      idx /= spectra[i].size();
    }
    return out;
  }

  std::size_t encode(const std::vector<std::size_t>& digits) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < spectra.size(); ++i) idx = idx * spectra[i].size() + digits[i];
    return idx;
  }

  std::size_t subset_size(std::size_t j) const {
    std::size_t n = 1;
    for (auto i : commuting_subsets[j]) n *= spectra[i].size();
    return n;
  }

  /// Index into the table of subset j for the joint point with the given digits.
  std::size_t subset_index(std::size_t j, const std::vector<std::size_t>& digits) const {
    std::size_t idx = 0;
    for (auto i : commuting_subsets[j]) idx = idx * spectra[i].size() + digits[i];
    return idx;
  }

  std::vector<std::size_t> subset_digits(std::size_t j, std::size_t idx) const {
    const auto& js = commuting_subsets[j];
    std::vector<std::size_t> out(js.size());
    for (std::size_t k = js.size(); k-- > 0;) {
      out[k] = idx % spectra[js[k]].size();
      idx /= spectra[js[k]].size();
    }
    return out;
  }
};

inline constexpr double kCommutatorTol = 1e-10;
inline constexpr double kSpectrumTol = 1e-8;

/// Validates the observables and commuting subsets and computes spectral data.
inline BellScenario make_scenario(std::vector<CMatrix> observables, std::vector<std::vector<std::size_t>> subsets,
                                  std::vector<std::string> labels = {}) {
  if (observables.empty()) throw Error(ErrorCode::InvalidInput, "scenario has no observables", "observables");
  const Eigen::Index dim = observables[0].rows();
  BellScenario s;
  for (std::size_t i = 0; i < observables.size(); ++i) {
    const auto& x = observables[i];
    const std::string field = "observables[" + std::to_string(i) + "]";
    if (x.rows() != dim || x.cols() != dim) throw Error(ErrorCode::DimensionMismatch, "observable has wrong shape", field);
    if ((x - x.adjoint()).norm() > 1e-10) throw Error(ErrorCode::InvalidInput, "observable is not Hermitian", field);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(x);
    std::vector<double> spec;
    std::vector<CMatrix> proj;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double ev = es.eigenvalues()(k);
      const CMatrix p = es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
      if (!spec.empty() && std::abs(ev - spec.back()) < kSpectrumTol) {
        proj.back() += p;
      } else {
        spec.push_back(ev);
        proj.push_back(p);
      }
    }
    for (auto& v : spec) {
      if (std::abs(v - std::round(v)) < kSpectrumTol) v = std::round(v);
    }
    s.spectra.push_back(std::move(spec));
    s.projectors.push_back(std::move(proj));
  }
  for (std::size_t j = 0; j < subsets.size(); ++j) {
    const std::string field = "commuting_subsets[" + std::to_string(j) + "]";
    auto& js = subsets[j];
    if (js.empty()) throw Error(ErrorCode::InvalidInput, "empty commuting subset", field);
    std::sort(js.begin(), js.end());
    if (std::adjacent_find(js.begin(), js.end()) != js.end())
      throw Error(ErrorCode::InvalidInput, "repeated observable in commuting subset", field);
    for (auto i : js)
      if (i >= observables.size()) throw Error(ErrorCode::InvalidInput, "observable index out of range", field);
    for (std::size_t a = 0; a < js.size(); ++a)
      for (std::size_t b = a + 1; b < js.size(); ++b) {
        const CMatrix& x = observables[js[a]];
        const CMatrix& y = observables[js[b]];
        if ((x * y - y * x).norm() >= kCommutatorTol) {
          throw Error(ErrorCode::NotCommuting,
                      "observables " + std::to_string(js[a]) + " and " + std::to_string(js[b]) + " do not commute", field);
        }
      }
  }
  s.observables = std::move(observables);
  s.commuting_subsets = std::move(subsets);
  if (labels.empty()) {
    for (std::size_t i = 0; i < s.observables.size(); ++i) labels.push_back("X" + std::to_string(i + 1));
  }
  if (labels.size() != s.observables.size()) throw Error(ErrorCode::InvalidInput, "one label per observable", "labels");
  s.labels = std::move(labels);
  return s;
}

namespace detail {

inline CMatrix pauli(int k) {
  CMatrix p(2, 2);
  switch (k) {
    case 0: p << 0.0, 1.0, 1.0, 0.0; break;
    case 1: p << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0; break;
    default: p << 1.0, 0.0, 0.0, -1.0; break;
  }
  return p;
}

/// Observable acting as op on qubit k of an n-qubit register.
inline CMatrix on_qubit(int n, int k, const CMatrix& op) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    const CMatrix f = q == k ? op : CMatrix(CMatrix::Identity(2, 2));
    CMatrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = out(r, c) * f;
    out = next;
  }
  return out;
}

}  // namespace detail

/// Two qubits with A1 = Z, A2 = X and B1, B2 = (Z +- X)/sqrt2; pairs (A_i, B_j) commute.
inline BellScenario chsh_scenario() {
  const CMatrix z = detail::pauli(2), x = detail::pauli(0);
  const double r = 1.0 / std::sqrt(2.0);
  return make_scenario({detail::on_qubit(2, 0, z), detail::on_qubit(2, 0, x), detail::on_qubit(2, 1, r * (z + x)),
                        detail::on_qubit(2, 1, r * (z - x))},
                       {{0, 2}, {0, 3}, {1, 2}, {1, 3}}, {"A1", "A2", "B1", "B2"});
}

/// Three qubits, Z and X on each site, one commuting subset per choice of settings.
inline BellScenario three_party_scenario() {
  std::vector<CMatrix> obs;
  std::vector<std::string> labels;
  const char names[3] = {'A', 'B', 'C'};
  for (int q = 0; q < 3; ++q)
    for (int k = 0; k < 2; ++k) {
      obs.push_back(detail::on_qubit(3, q, detail::pauli(k == 0 ? 2 : 0)));
      labels.push_back(std::string(1, names[q]) + std::to_string(k + 1));
    }
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 2; b < 4; ++b)
      for (std::size_t c = 4; c < 6; ++c) subsets.push_back({a, b, c});
  return make_scenario(std::move(obs), std::move(subsets), std::move(labels));
}

/// F = sum_J f_J(lambda_J); tables are indexed in the digit order of the subset.
struct KellererFunction {
  std::vector<RVector> tables;

  double operator()(const BellScenario& s, const std::vector<std::size_t>& digits) const {
    double v = 0.0;
    for (std::size_t j = 0; j < tables.size(); ++j) v += tables[j](static_cast<Eigen::Index>(s.subset_index(j, digits)));
    return v;
  }
};

inline void check_function(const BellScenario& s, const KellererFunction& f) {
  if (f.tables.size() != s.commuting_subsets.size())
    throw Error(ErrorCode::ShapeError, "one table per commuting subset is required", "tables");
  for (std::size_t j = 0; j < f.tables.size(); ++j) {
    if (static_cast<std::size_t>(f.tables[j].size()) != s.subset_size(j))
      throw Error(ErrorCode::ShapeError, "table size does not match the subset's joint spectrum",
                  "tables[" + std::to_string(j) + "]");
  }
}

/// Values of F on every joint point.
inline RVector function_values(const BellScenario& s, const KellererFunction& f) {
  check_function(s, f);
  RVector out(static_cast<Eigen::Index>(s.joint_size()));
  for (std::size_t idx = 0; idx < s.joint_size(); ++idx) out(static_cast<Eigen::Index>(idx)) = f(s, s.decode(idx));
  return out;
}

/// Product of the spectral projectors of subset j selected by a table index.
inline CMatrix joint_projector(const BellScenario& s, std::size_t j, std::size_t idx) {
  const auto digits = s.subset_digits(j, idx);
  const auto& js = s.commuting_subsets[j];
  CMatrix p = s.projectors[js[0]][digits[0]];
  for (std::size_t k = 1; k < js.size(); ++k) p = p * s.projectors[js[k]][digits[k]];
  return p;
}

/// F(X) = sum_J f_J(X_J).
inline CMatrix function_operator(const BellScenario& s, const KellererFunction& f) {
  check_function(s, f);
  const Eigen::Index dim = s.observables[0].rows();
  CMatrix out = CMatrix::Zero(dim, dim);
  for (std::size_t j = 0; j < f.tables.size(); ++j)
    for (std::size_t idx = 0; idx < s.subset_size(j); ++idx) {
      const double c = f.tables[j](static_cast<Eigen::Index>(idx));
      if (c != 0.0) out += c * joint_projector(s, j, idx);
    }
  return 0.5 * (out + out.adjoint());
}

/// Incidence matrix of the parametrization: column (J, lambda_J) is the indicator of
/// the joint points projecting onto lambda_J.
inline RMatrix parametrization_matrix(const BellScenario& s) {
  std::size_t cols = 0;
  std::vector<std::size_t> offset;
  for (std::size_t j = 0; j < s.commuting_subsets.size(); ++j) {
    offset.push_back(cols);
    cols += s.subset_size(j);
  }
  RMatrix m = RMatrix::Zero(static_cast<Eigen::Index>(s.joint_size()), static_cast<Eigen::Index>(cols));
  for (std::size_t idx = 0; idx < s.joint_size(); ++idx) {
    const auto d = s.decode(idx);
    for (std::size_t j = 0; j < s.commuting_subsets.size(); ++j)
      m(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(offset[j] + s.subset_index(j, d))) = 1.0;
  }
  return m;
}

/// Minimum-norm decomposition of a table over the joint space into subset tables.
/// Throws InvalidInput when the values are not of the Kellerer form.
inline KellererFunction decompose(const BellScenario& s, const RVector& values) {
  const RMatrix m = parametrization_matrix(s);
  const RVector coef = m.completeOrthogonalDecomposition().solve(values);
  if ((m * coef - values).norm() > 1e-8 * std::max(1.0, values.norm()))
    throw Error(ErrorCode::InvalidInput, "values are not a sum of functions on commuting subsets", "function");
  KellererFunction f;
  Eigen::Index at = 0;
  for (std::size_t j = 0; j < s.commuting_subsets.size(); ++j) {
    const auto n = static_cast<Eigen::Index>(s.subset_size(j));
    RVector t = coef.segment(at, n);
    for (auto& v : t)
      if (std::abs(v) < 1e-13) v = 0.0;
    f.tables.push_back(t);
    at += n;
  }
  return f;
}

inline bool is_dichotomic(const BellScenario& s) {
  for (const auto& sp : s.spectra)
    if (sp.size() != 2 || sp[0] != -1.0 || sp[1] != 1.0) return false;
  return true;
}

/// Correlator expansion F = sum_S c_S prod_{i in S} lambda_i for +-1 spectra.
struct CorrelatorTerm {
  std::vector<std::size_t> observables;
  double coefficient = 0.0;
};

inline std::vector<CorrelatorTerm> correlator_expansion(const BellScenario& s, const RVector& values) {
  if (!is_dichotomic(s)) throw Error(ErrorCode::InvalidInput, "correlator expansion needs +-1 spectra", "spectra");
  const std::size_t n = s.size();
  const std::size_t total = s.joint_size();
  std::vector<CorrelatorTerm> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double c = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
      const auto d = s.decode(idx);
      double sign = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1U) sign *= d[i] == 0 ? -1.0 : 1.0;
      c += sign * values(static_cast<Eigen::Index>(idx));
    }
    c /= static_cast<double>(total);
    if (std::abs(c) < 1e-12) continue;
    CorrelatorTerm t;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1U) t.observables.push_back(i);
    t.coefficient = c;
    out.push_back(std::move(t));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.observables.size() != b.observables.size() ? a.observables.size() > b.observables.size()
                                                        : a.observables < b.observables;
  });
  return out;
}

/// Builds a Kellerer function from correlator terms; each product must lie inside a
/// commuting subset.
inline KellererFunction from_correlators(const BellScenario& s, const std::vector<CorrelatorTerm>& terms) {
  if (!is_dichotomic(s)) throw Error(ErrorCode::InvalidInput, "correlator form needs +-1 spectra", "spectra");
  KellererFunction f;
  for (std::size_t j = 0; j < s.commuting_subsets.size(); ++j)
    f.tables.push_back(RVector::Zero(static_cast<Eigen::Index>(s.subset_size(j))));
  for (const auto& t : terms) {
    std::size_t host = s.commuting_subsets.size();
    for (std::size_t j = 0; j < s.commuting_subsets.size() && host == s.commuting_subsets.size(); ++j) {
      const auto& js = s.commuting_subsets[j];
      if (std::includes(js.begin(), js.end(), t.observables.begin(), t.observables.end())) host = j;
    }
    if (host == s.commuting_subsets.size())
      throw Error(ErrorCode::NotCommuting, "correlator term is not inside a commuting subset", "terms");
    const auto& js = s.commuting_subsets[host];
    for (std::size_t idx = 0; idx < s.subset_size(host); ++idx) {
      const auto d = s.subset_digits(host, idx);
      double v = t.coefficient;
      for (std::size_t k = 0; k < js.size(); ++k)
        if (std::binary_search(t.observables.begin(), t.observables.end(), js[k])) v *= d[k] == 0 ? -1.0 : 1.0;
      f.tables[host](static_cast<Eigen::Index>(idx)) += v;
    }
  }
  return f;
}

/// a1 b1 + a2 b1 + a2 b2 - a1 b2 + 2 on the CHSH scenario.
inline KellererFunction chsh_function(const BellScenario& s) {
  return from_correlators(s, {{{0, 2}, 1.0}, {{1, 2}, 1.0}, {{1, 3}, 1.0}, {{0, 3}, -1.0}, {{}, 2.0}});
}

// ---------------------------------------------------------------------------
// Quantum values.

struct QuantumValue {
  double value = 0.0;
  CVector state;
};

/// Minimum eigenvalue of F(X) and its eigenvector: the strongest quantum violation.
inline QuantumValue quantum_value(const BellScenario& s, const KellererFunction& f) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(function_operator(s, f));
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

/// <psi|F(X)|psi> for a normalized psi.
inline double expectation_value(const BellScenario& s, const KellererFunction& f, const CVector& psi) {
  if (psi.size() != s.observables[0].rows()) throw Error(ErrorCode::DimensionMismatch, "state dimension mismatch", "state");
  const CVector u = psi.normalized();
  return u.dot(function_operator(s, f) * u).real();
}

// ---------------------------------------------------------------------------
// Classical feasibility.

inline constexpr std::size_t kMaxFeasibilityJoint = std::size_t{1} << 20;
inline constexpr std::size_t kMaxEnumerationJoint = 4096;

/// Distributions on Lambda_J induced by a quantum state.
inline std::vector<RVector> quantum_margins(const BellScenario& s, const CVector& psi) {
  if (psi.size() != s.observables[0].rows()) throw Error(ErrorCode::DimensionMismatch, "state dimension mismatch", "state");
  const CVector u = psi.normalized();
  std::vector<RVector> out;
  for (std::size_t j = 0; j < s.commuting_subsets.size(); ++j) {
    RVector p(static_cast<Eigen::Index>(s.subset_size(j)));
    for (std::size_t idx = 0; idx < s.subset_size(j); ++idx)
      p(static_cast<Eigen::Index>(idx)) = std::max(0.0, u.dot(joint_projector(s, j, idx) * u).real());
    out.push_back(p / p.sum());
  }
  return out;
}

/// Margins of a joint distribution on Lambda.
inline std::vector<RVector> classical_margins(const BellScenario& s, const RVector& joint) {
  if (static_cast<std::size_t>(joint.size()) != s.joint_size())
    throw Error(ErrorCode::DimensionMismatch, "joint distribution has wrong size", "joint");
  std::vector<RVector> out;
  for (std::size_t j = 0; j < s.commuting_subsets.size(); ++j) out.push_back(RVector::Zero(static_cast<Eigen::Index>(s.subset_size(j))));
  for (std::size_t idx = 0; idx < s.joint_size(); ++idx) {
    const auto d = s.decode(idx);
    for (std::size_t j = 0; j < out.size(); ++j) out[j](static_cast<Eigen::Index>(s.subset_index(j, d))) += joint(static_cast<Eigen::Index>(idx));
  }
  return out;
}

struct FeasibilityResult {
  bool feasible = false;
  RVector joint;                                  // witness distribution on Lambda
  double residual = 0.0;                          // max margin error of the witness
  std::optional<KellererFunction> certificate;    // F >= 0 on Lambda with negative pairing
  double pairing = 0.0;                           // sum_J <f_J, p_J>
  double certificate_min = 0.0;                   // min_lambda F(lambda)
};

inline double pairing(const KellererFunction& f, const std::vector<RVector>& margins) {
  double v = 0.0;
  for (std::size_t j = 0; j < margins.size(); ++j) v += f.tables[j].dot(margins[j]);
  return v;
}

/// Solves the marginal problem by phase-one simplex; returns a witness or a Kellerer
/// certificate of infeasibility.
inline FeasibilityResult classical_feasibility(const BellScenario& s, const std::vector<RVector>& margins,
                                               const FeasibilityOptions& opts = {}) {
  const std::size_t total = s.joint_size();
  if (total > kMaxFeasibilityJoint)
    throw Error(ErrorCode::SizeLimit, "joint spectrum has " + std::to_string(total) + " points (limit 2^20)", "observables");
  if (margins.size() != s.commuting_subsets.size())
    throw Error(ErrorCode::ShapeError, "one margin per commuting subset is required", "margins");
  std::vector<std::size_t> offset;
  std::size_t rows = 0;
  for (std::size_t j = 0; j < margins.size(); ++j) {
    const std::string field = "margins[" + std::to_string(j) + "]";
    if (static_cast<std::size_t>(margins[j].size()) != s.subset_size(j))
      throw Error(ErrorCode::ShapeError, "margin size does not match the subset's joint spectrum", field);
    if (margins[j].minCoeff() < -1e-12) throw Error(ErrorCode::InvalidInput, "margin has a negative entry", field);
    if (std::abs(margins[j].sum() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidInput, "margin does not sum to 1", field);
    offset.push_back(rows);
    rows += s.subset_size(j);
  }
  RVector b(static_cast<Eigen::Index>(rows));
  for (std::size_t j = 0; j < margins.size(); ++j) b.segment(static_cast<Eigen::Index>(offset[j]), margins[j].size()) = margins[j];

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(total * margins.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto d = s.decode(idx);
    for (std::size_t j = 0; j < margins.size(); ++j)
      trip.emplace_back(static_cast<int>(offset[j] + s.subset_index(j, d)), static_cast<int>(idx), 1.0);
  }
  SparseMatrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(total));
  a.setFromTriplets(trip.begin(), trip.end());

  const LpResult lp = phase_one(a, b, opts);
  FeasibilityResult res;
  res.feasible = lp.feasible;
  if (lp.feasible) {
    res.joint = lp.x / lp.x.sum();
    const auto got = classical_margins(s, res.joint);
    for (std::size_t j = 0; j < margins.size(); ++j)
      res.residual = std::max(res.residual, (got[j] - margins[j]).cwiseAbs().maxCoeff());
    return res;
  }
  KellererFunction f;
  for (std::size_t j = 0; j < margins.size(); ++j)
    f.tables.push_back(lp.dual.segment(static_cast<Eigen::Index>(offset[j]), static_cast<Eigen::Index>(s.subset_size(j))));
  // Lift F by a constant so that it is nonnegative on the nose; the pairing moves by
  // the same constant because each margin sums to one.
  const double lo = function_values(s, f).minCoeff();
  if (lo < 0.0) f.tables[0].array() -= lo;
  res.certificate_min = function_values(s, f).minCoeff();
  res.pairing = pairing(f, margins);
  res.certificate = std::move(f);
  return res;
}

// ---------------------------------------------------------------------------
// Extremal inequalities.

enum class ConeMode { Kellerer, Correlation };

struct EnumerationOptions {
  ConeMode mode = ConeMode::Kellerer;
  std::size_t max_rays = 200000;
  std::size_t max_permuted_observables = 8;  // beyond this only value reversals are used
};

struct InequalityCertificate {
  KellererFunction function;
  exact::IntVector values;  // canonical representative on Lambda, primitive
  bool extremal = false;
  bool trivial = false;     // depends on a single lambda_J only
  std::size_t symmetry_class = 0;
  std::size_t orbit_size = 0;  // rays of the enumeration in this class
  double min_over_lambda = 0.0;
};

struct EnumerationResult {
  std::vector<InequalityCertificate> classes;
  std::size_t ray_count = 0;
  std::size_t dimension = 0;
  std::size_t group_order = 0;

  std::size_t nontrivial_count() const {
    return static_cast<std::size_t>(std::count_if(classes.begin(), classes.end(), [](const auto& c) { return !c.trivial; }));
  }
};

namespace detail {

/// A symmetry: observable i goes to slot perm[i], with its spectrum reversed if flip bit i is set.
struct ScenarioSymmetry {
  std::vector<std::size_t> perm;
  std::uint64_t flips = 0;
};

inline std::vector<std::vector<std::size_t>> automorphisms(const BellScenario& s, std::size_t max_n) {
  const std::size_t n = s.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  if (n > max_n) return {perm};
  std::set<std::vector<std::size_t>> family;
  for (const auto& js : s.commuting_subsets) family.insert(js);
  std::vector<std::vector<std::size_t>> out;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = s.spectra[i].size() == s.spectra[perm[i]].size();
    for (auto it = family.begin(); it != family.end() && ok; ++it) {
      std::vector<std::size_t> img;
      for (auto i : *it) img.push_back(perm[i]);
      std::sort(img.begin(), img.end());
      ok = family.count(img) > 0;
    }
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

inline std::vector<ScenarioSymmetry> symmetry_group(const BellScenario& s, std::size_t max_n) {
  std::vector<ScenarioSymmetry> g;
  const auto autos = automorphisms(s, max_n);
  const std::uint64_t flips = std::uint64_t{1} << s.size();
  for (const auto& p : autos)
    for (std::uint64_t f = 0; f < flips; ++f) g.push_back({p, f});
  return g;
}

inline exact::IntVector act(const BellScenario& s, const ScenarioSymmetry& g, const exact::IntVector& v) {
  exact::IntVector out(v.size());
  std::vector<std::size_t> d2(s.size());
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    const auto d = s.decode(idx);
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::size_t k = (g.flips >> i) & 1U ? s.spectra[i].size() - 1 - d[i] : d[i];
      d2[g.perm[i]] = k;
    }
    out[s.encode(d2)] = v[idx];
  }
  return out;
}

inline exact::IntVector canonical(const BellScenario& s, const std::vector<ScenarioSymmetry>& group,
                                  const exact::IntVector& v) {
  exact::IntVector best = v;
  for (const auto& g : group) {
    auto w = act(s, g, v);
    if (w < best) best = std::move(w);
  }
  return best;
}

/// True when F is constant on the fibres of the projection onto some Lambda_J.
inline bool depends_on_single_subset(const BellScenario& s, const exact::IntVector& v) {
  for (std::size_t j = 0; j < s.commuting_subsets.size(); ++j) {
    std::vector<std::optional<exact::Int>> seen(s.subset_size(j));
    bool ok = true;
    for (std::size_t idx = 0; idx < v.size() && ok; ++idx) {
      auto& slot = seen[s.subset_index(j, s.decode(idx))];
      if (!slot) slot = v[idx];
      else ok = *slot == v[idx];
    }
    if (ok) return true;
  }
  return false;
}

/// Integer generators of the function space, one column per generator, rows indexed by Lambda.
inline std::vector<exact::IntVector> generator_columns(const BellScenario& s, ConeMode mode) {
  const std::size_t total = s.joint_size();
  std::vector<exact::IntVector> cols;
  if (mode == ConeMode::Kellerer) {
    for (std::size_t j = 0; j < s.commuting_subsets.size(); ++j)
      for (std::size_t t = 0; t < s.subset_size(j); ++t) {
        exact::IntVector c(total, 0);
        for (std::size_t idx = 0; idx < total; ++idx) c[idx] = s.subset_index(j, s.decode(idx)) == t ? 1 : 0;
        cols.push_back(std::move(c));
      }
    return cols;
  }
  if (!is_dichotomic(s)) throw Error(ErrorCode::InvalidInput, "correlation cone needs +-1 spectra", "spectra");
  cols.emplace_back(total, 1);
  for (const auto& js : s.commuting_subsets) {
    exact::IntVector c(total, 1);
    for (std::size_t idx = 0; idx < total; ++idx) {
      const auto d = s.decode(idx);
      for (auto i : js) c[idx] *= d[i] == 0 ? -1 : 1;
    }
    cols.push_back(std::move(c));
  }
  return cols;
}

}  // namespace detail

/// Extremal rays of the Kellerer cone (or its correlation-only subcone) by double
/// description, one representative per symmetry class.
inline EnumerationResult enumerate_extremal(const BellScenario& s, const EnumerationOptions& opts = {}) {
  const std::size_t total = s.joint_size();
  if (total > kMaxEnumerationJoint)
    throw Error(ErrorCode::SizeLimit, "joint spectrum has " + std::to_string(total) + " points (limit 4096)", "observables");

  // Pivot columns give an exact integer basis B of the function space.
  const auto gens = detail::generator_columns(s, opts.mode);
  exact::Echelon ech(total);
  std::vector<exact::IntVector> basis;
  for (const auto& c : gens)
    if (ech.insert(c)) basis.push_back(c);
  const std::size_t r = basis.size();

  std::vector<exact::IntVector> rows(total, exact::IntVector(r));
  for (std::size_t idx = 0; idx < total; ++idx)
    for (std::size_t k = 0; k < r; ++k) rows[idx][k] = basis[k][idx];

  DoubleDescriptionOptions dd;
  dd.max_rays = opts.max_rays;
  const auto rays = extreme_rays(rows, r, dd);

  EnumerationResult res;
  res.ray_count = rays.size();
  res.dimension = r;
  const auto group = detail::symmetry_group(s, opts.max_permuted_observables);
  res.group_order = group.size();

  std::map<exact::IntVector, InequalityCertificate> classes;
  for (const auto& y : rays) {
    exact::IntVector f(total);
    for (std::size_t idx = 0; idx < total; ++idx) f[idx] = exact::narrow(exact::dot(rows[idx], y));
    exact::normalize(f);

    std::vector<exact::IntVector> active;
    for (std::size_t idx = 0; idx < total; ++idx)
      if (f[idx] == 0) active.push_back(rows[idx]);

    auto key = detail::canonical(s, group, f);
    auto [it, fresh] = classes.try_emplace(key);
    auto& cert = it->second;
    ++cert.orbit_size;
    if (!fresh) continue;
    cert.values = key;
    cert.extremal = exact::rank(active, r) + 1 == r;
    cert.trivial = detail::depends_on_single_subset(s, key);
    RVector v(static_cast<Eigen::Index>(total));
    for (std::size_t idx = 0; idx < total; ++idx) v(static_cast<Eigen::Index>(idx)) = static_cast<double>(key[idx]);
    cert.function = decompose(s, v);
    cert.min_over_lambda = function_values(s, cert.function).minCoeff();
  }
  for (auto& [key, cert] : classes) res.classes.push_back(std::move(cert));
  std::stable_sort(res.classes.begin(), res.classes.end(),
                   [](const auto& a, const auto& b) { return a.trivial && !b.trivial; });
  for (std::size_t i = 0; i < res.classes.size(); ++i) res.classes[i].symmetry_class = i;
  return res;
}

/// Canonical form of an arbitrary integer-valued function on Lambda under the
/// scenario's symmetry group; two functions are equivalent iff the forms agree.
inline exact::IntVector canonical_form(const BellScenario& s, const RVector& values, const EnumerationOptions& opts = {}) {
  exact::IntVector v(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double x = std::round(values(i));
    if (std::abs(x - values(i)) > 1e-9) throw Error(ErrorCode::InvalidInput, "function values must be integers", "values");
    v[static_cast<std::size_t>(i)] = static_cast<exact::Int>(x);
  }
  exact::normalize(v);
  return detail::canonical(s, detail::symmetry_group(s, opts.max_permuted_observables), v);
}

// ---------------------------------------------------------------------------
// Pentagon.

struct PentagonConfig {
  std::array<CVector, 5> e;
};

/// Checks unit length, dimension three, and e_i orthogonal to e_{i+1}.
inline PentagonConfig make_pentagon(std::array<CVector, 5> e) {
  for (std::size_t i = 0; i < 5; ++i) {
    const std::string field = "vectors[" + std::to_string(i) + "]";
    if (e[i].size() != 3) throw Error(ErrorCode::DimensionMismatch, "pentagon vectors live in C^3", field);
    if (e[i].norm() < 1e-12) throw Error(ErrorCode::InvalidInput, "zero vector", field);
    e[i].normalize();
  }
  for (std::size_t i = 0; i < 5; ++i) {
    const double ov = std::abs(e[i].dot(e[(i + 1) % 5]));
    if (ov >= 1e-9)
      throw Error(ErrorCode::NotOrthogonal,
                  "e" + std::to_string(i + 1) + " and e" + std::to_string((i + 1) % 5 + 1) + " overlap by " + std::to_string(ov),
                  "vectors");
  }
  return {std::move(e)};
}

/// Half-angle of the regular configuration: cos^2 = cos(pi/5) / (1 + cos(pi/5)).
inline double regular_pentagon_cos2() {
  const double c = std::cos(kPi / 5.0);
  return c / (1.0 + c);
}

/// Five vectors on a cone about the z axis, consecutive ones 144 degrees apart.
inline PentagonConfig regular_pentagon() {
  const double c = std::sqrt(regular_pentagon_cos2());
  const double s = std::sqrt(1.0 - c * c);
  std::array<CVector, 5> e;
  for (int k = 0; k < 5; ++k) {
    const double phi = 4.0 * kPi * k / 5.0;
    e[static_cast<std::size_t>(k)] = CVector(3);
    e[static_cast<std::size_t>(k)] << s * std::cos(phi), s * std::sin(phi), c;
  }
  return make_pentagon(std::move(e));
}

inline CVector pentagon_axis() { return (CVector(3) << 0.0, 0.0, 1.0).finished(); }

/// Random complex cyclic quintuplet; e5 closes the cycle as conj(e4 x e1).
inline PentagonConfig random_pentagon(Rng& rng) {
  for (;;) {
    std::array<CVector, 5> e;
    e[0] = random_vector(rng, 3).normalized();
    for (std::size_t i = 1; i < 4; ++i) {
      CVector v = random_vector(rng, 3);
      v -= e[i - 1] * e[i - 1].dot(v);
      e[i] = v.normalized();
    }
    const CVector& a = e[3];
    const CVector& b = e[0];
    CVector x(3);
    x << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
    x = x.conjugate().eval();
    if (x.norm() < 1e-6) continue;
    e[4] = x.normalized();
    bool collinear = false;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j) collinear = collinear || std::abs(e[i].dot(e[j])) > 1.0 - 1e-6;
    if (!collinear) return make_pentagon(std::move(e));
  }
}

/// Reflections S_i = 1 - 2|e_i><e_i| with consecutive pairs commuting.
inline BellScenario pentagon_scenario(const PentagonConfig& cfg) {
  std::vector<CMatrix> obs;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < 5; ++i) {
    obs.push_back(CMatrix::Identity(3, 3) - 2.0 * cfg.e[i] * cfg.e[i].adjoint());
    labels.push_back("S" + std::to_string(i + 1));
  }
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t i = 0; i < 5; ++i) subsets.push_back({i, (i + 1) % 5});
  return make_scenario(std::move(obs), std::move(subsets), std::move(labels));
}

/// s1 s2 + s2 s3 + s3 s4 + s4 s5 + s5 s1 + 3.
inline KellererFunction pentagon_function(const BellScenario& s) {
  std::vector<CorrelatorTerm> terms;
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<std::size_t> pair{i, (i + 1) % 5};
    std::sort(pair.begin(), pair.end());
    terms.push_back({pair, 1.0});
  }
  terms.push_back({{}, 3.0});
  return from_correlators(s, terms);
}

struct PentagonReport {
  double cos2_sum = 0.0;        // sum_i |<psi|e_i>|^2
  double expectation = 0.0;     // <psi| sum S_i S_{i+1} |psi>
  double min_eigenvalue = 0.0;  // of sum S_i S_{i+1}
  CVector min_state;
  CVector state;
};

inline CMatrix pentagon_operator(const PentagonConfig& cfg) {
  CMatrix sum = CMatrix::Zero(3, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    const CMatrix a = CMatrix::Identity(3, 3) - 2.0 * cfg.e[i] * cfg.e[i].adjoint();
    const CMatrix b = CMatrix::Identity(3, 3) - 2.0 * cfg.e[(i + 1) % 5] * cfg.e[(i + 1) % 5].adjoint();
    sum += a * b;
  }
  return 0.5 * (sum + sum.adjoint());
}

/// Evaluates the pentagon inequality for psi (the minimizing eigenvector if empty).
inline PentagonReport pentagon(const PentagonConfig& cfg, const CVector& psi = {}) {
  PentagonReport r;
  const CMatrix op = pentagon_operator(cfg);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(op);
  r.min_eigenvalue = es.eigenvalues()(0);
  r.min_state = es.eigenvectors().col(0);
  if (psi.size() != 0 && psi.size() != 3) throw Error(ErrorCode::DimensionMismatch, "pentagon states live in C^3", "state");
  r.state = psi.size() == 0 ? r.min_state : CVector(psi.normalized());
  for (const auto& e : cfg.e) r.cos2_sum += std::norm(e.dot(r.state));
  r.expectation = r.state.dot(op * r.state).real();
  return r;
}

}  // namespace entangle
