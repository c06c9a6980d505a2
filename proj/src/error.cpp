#include "psmas/error.hpp"

namespace psmas {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::UnknownAgentId: return "UnknownAgentId";
    case ErrorCode::DuplicateAgentId: return "DuplicateAgentId";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfEdge: return "SelfEdge";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::IncompatibleShape: return "IncompatibleShape";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EdgeNotInGraph: return "EdgeNotInGraph";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::PhaseMapMismatch: return "PhaseMapMismatch";
    case ErrorCode::NonPositiveOmega: return "NonPositiveOmega";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace psmas
