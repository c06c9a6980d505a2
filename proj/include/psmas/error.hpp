#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psmas {

enum class ErrorCode {
  InvalidInput,
  UnknownAgentId,
  DuplicateAgentId,
  DuplicateEdge,
  SelfEdge,
  CycleDetected,
  IncompatibleShape,
  NonFiniteInput,
  EdgeNotInGraph,
  OutOfRange,
  DegenerateDenominator,
  NonPositiveSigma,
  PhaseMapMismatch,
  NonPositiveOmega,
  ModeMismatch,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Raised by every operation in the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for errors caused by malformed caller input rather than runtime conditions.
  bool is_validation() const noexcept { return code_ != ErrorCode::Io; }

 private:
  ErrorCode code_;
};

}  // namespace psmas
