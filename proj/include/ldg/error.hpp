#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldg {

enum class ErrorCode {
  DegenerateSpectrum,
  NotTangent,
  NotOnManifold,
  ConstraintViolated,
  BoundaryNode,
  GridMismatch,
  CenterOnLattice,
  StiffnessFailure,
  NonManifoldBoundary,
  IllConditionedT,
  DegenerateFit,
  InvalidArgument,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NotTangent: return "NotTangent";
    case ErrorCode::NotOnManifold: return "NotOnManifold";
    case ErrorCode::ConstraintViolated: return "ConstraintViolated";
    case ErrorCode::BoundaryNode: return "BoundaryNode";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::CenterOnLattice: return "CenterOnLattice";
    case ErrorCode::StiffnessFailure: return "StiffnessFailure";
    case ErrorCode::NonManifoldBoundary: return "NonManifoldBoundary";
    case ErrorCode::IllConditionedT: return "IllConditionedT";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ldg
