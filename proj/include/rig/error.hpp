#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rig {

enum class ErrorCode {
  InvalidSpec,
  InfiniteMoment,
  NegativeOrder,
  ToleranceNotMet,
  ZeroMean,
  NegativeRate,
  EmptyJoint,
  UnsupportedRegime,
  ShapeMismatch,
  TooManyTerms,
  SizeGuard,
  CapExceeded,
  StateGuard,
  NoEdges,
  NoPaths,
  ZeroVariance,
  InsufficientSupport,
  ConfigError,
  RegimeMismatch,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InfiniteMoment: return "InfiniteMoment";
    case ErrorCode::NegativeOrder: return "NegativeOrder";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::ZeroMean: return "ZeroMean";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::EmptyJoint: return "EmptyJoint";
    case ErrorCode::UnsupportedRegime: return "UnsupportedRegime";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooManyTerms: return "TooManyTerms";
    case ErrorCode::SizeGuard: return "SizeGuard";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::StateGuard: return "StateGuard";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::NoPaths: return "NoPaths";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::InsufficientSupport: return "InsufficientSupport";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
  }
  return "Unknown";
}

}  // namespace rig
