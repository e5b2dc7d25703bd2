#include "qdyn/error.hpp"

namespace qdyn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::BoundaryLeak: return "BoundaryLeak";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::TruncationError: return "TruncationError";
    case ErrorCode::ThermostatDivergence: return "ThermostatDivergence";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::BoundaryDominated: return "BoundaryDominated";
    case ErrorCode::SupremumAtEdge: return "SupremumAtEdge";
    case ErrorCode::FlatCurvature: return "FlatCurvature";
    case ErrorCode::MinimumAtEdge: return "MinimumAtEdge";
    case ErrorCode::EnergyDrift: return "EnergyDrift";
    case ErrorCode::NonuniformGrid: return "NonuniformGrid";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ConvexityViolation: return "ConvexityViolation";
  }
  return "Unknown";
}

}  // namespace qdyn
