#pragma once

#include "entangle/repr_core.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace entangle {

enum class StabilityClass {
  Coherent,
  CompletelyEntangled,
  Semistable,
  Unstable,
  // The moment test alone cannot decide; another method must.
  Indeterminate,
  // A method ran but could not reach a verdict (boundary case or iteration limit).
  Inconclusive,
};

enum class Method { Moment, KempfNess, HilbertMumford };

inline std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Coherent: return "Coherent";
    case StabilityClass::CompletelyEntangled: return "CompletelyEntangled";
    case StabilityClass::Semistable: return "Semistable";
    case StabilityClass::Unstable: return "Unstable";
    case StabilityClass::Indeterminate: return "Indeterminate";
    case StabilityClass::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Moment: return "moment";
    case Method::KempfNess: return "kempf_ness";
    case Method::HilbertMumford: return "hilbert_mumford";
  }
  return "unknown";
}

struct StabilityVerdict {
  StabilityClass cls = StabilityClass::Indeterminate;
  double moment_norm = 0.0;
  double variance = 0.0;
  double margin = 0.0;
  Method method = Method::Moment;
  double tolerance = 0.0;
  /// Hilbert-Mumford only: zero lies strictly inside every sampled support.
  bool stable = false;
  /// Hilbert-Mumford only: per-site unit directions of the deciding frame.
  std::vector<Vec3> certificate_frame;
  std::string note;
};

/// True when the verdict places the state outside the null cone.
inline bool is_semistable(StabilityClass c) {
  return c == StabilityClass::CompletelyEntangled || c == StabilityClass::Semistable;
}

inline constexpr double kDefaultMomentTol = 1e-8;

/// Decides complete entanglement (zero moment vector) or coherence (minimal total
/// variance). Anything else is Indeterminate and must be escalated.
inline StabilityVerdict classify_by_moment(const QuantumState& state, const ObservableBasis& basis,
                                           const RepresentationData& rep,
                                           double tol = kDefaultMomentTol) {
  StabilityVerdict v;
  v.method = Method::Moment;
  v.tolerance = tol;
  v.moment_norm = moment_norm(state, basis);
  v.variance = total_variance(state, basis, rep);
  const double coherent_gap = v.variance - rep.lambda_rho;
  if (v.moment_norm <= tol) {
    v.cls = StabilityClass::CompletelyEntangled;
    v.margin = tol - v.moment_norm;
  } else if (coherent_gap <= tol) {
    v.cls = StabilityClass::Coherent;
    v.margin = tol - coherent_gap;
  } else {
    v.cls = StabilityClass::Indeterminate;
    v.margin = std::min(v.moment_norm, coherent_gap) - tol;
  }
  return v;
}

/// Whether a completely entangled state can exist: every n_i <= prod_{j != i} n_j.
inline bool check_capacity(const SystemSpec& spec) {
  if (spec.is_spin()) {
    throw Error(ErrorCode::SpinSpecNotApplicable, "capacity check applies to composite systems only",
                "system");
  }
  const auto& dims = spec.factors();
  const double total = static_cast<double>(spec.total_dim());
  for (int n : dims) {
    const double others = total / n;
    if (n > others) return false;
  }
  return true;
}

}  // namespace entangle
