#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace entangle {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Amplitudes below this fraction of the largest amplitude count as zero.
inline constexpr double kAmplitudeZero = 1e-10;

enum class ErrorCode {
  InvalidSpec,
  DimensionMismatch,
  NonScalarCasimir,
  FormulaMismatch,
  SpinSpecNotApplicable,
  ShapeError,
  NotSemistable,
  NotClosed,
  ZeroPolynomial,
  HalfIntegerSpin,
  SizeLimit,
  NotOrthogonal,
  NotCommuting,
  InvalidInput,
  Overflow,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonScalarCasimir: return "NonScalarCasimir";
    case ErrorCode::FormulaMismatch: return "FormulaMismatch";
    case ErrorCode::SpinSpecNotApplicable: return "SpinSpecNotApplicable";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::NotSemistable: return "NotSemistable";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::HalfIntegerSpin: return "HalfIntegerSpin";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

/// Library error. `field` names the offending input when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace entangle
