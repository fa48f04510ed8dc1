#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace formkit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Thresholds shared by every module.
///
/// `rank` is the relative cutoff used for every kernel/range decision:
/// an eigenvalue or singular value is treated as zero when it is at most
/// `rank * sigma_max`.  `residual` is the relative bound used when a
/// computed identity is checked against its defining matrix.
struct Tolerances {
  double rank = 1e-10;
  double residual = 1e-8;
};

enum class ErrorCode {
  NotHermitian,
  NotPSD,
  NonFinite,
  DimensionMismatch,
  DominationFails,
  NotInClassM,
  NotAbsolutelyContinuous,
  QuadraticBoundFails,
  NotSectorial,
  NoConvergence,
  WitnessResidualTooLarge,
  PreconditionFails,
  IncompatibleNorm,
  NotSolvable,
  TheoremViolation,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library.  Mathematical refusals
/// and input problems are distinguished by `code()`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for errors caused by malformed input rather than a mathematical
  /// refusal.
  bool is_input_error() const noexcept {
    return code_ == ErrorCode::ParseError || code_ == ErrorCode::ValidationError ||
           code_ == ErrorCode::DimensionMismatch || code_ == ErrorCode::NonFinite;
  }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DominationFails: return "DominationFails";
    case ErrorCode::NotInClassM: return "NotInClassM";
    case ErrorCode::NotAbsolutelyContinuous: return "NotAbsolutelyContinuous";
    case ErrorCode::QuadraticBoundFails: return "QuadraticBoundFails";
    case ErrorCode::NotSectorial: return "NotSectorial";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::WitnessResidualTooLarge: return "WitnessResidualTooLarge";
    case ErrorCode::PreconditionFails: return "PreconditionFails";
    case ErrorCode::IncompatibleNorm: return "IncompatibleNorm";
    case ErrorCode::NotSolvable: return "NotSolvable";
    case ErrorCode::TheoremViolation: return "TheoremViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace formkit
