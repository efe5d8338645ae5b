#include "occutime/error.hpp"

namespace occutime {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::NonConservative: return "NonConservative";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::PoleAtS: return "PoleAtS";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::ZeroH: return "ZeroH";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::EigFailure: return "EigFailure";
    case ErrorCode::InsufficientMoments: return "InsufficientMoments";
    case ErrorCode::DegenerateMeasure: return "DegenerateMeasure";
    case ErrorCode::NonConverged: return "NonConverged";
    case ErrorCode::HorizonMismatch: return "HorizonMismatch";
  }
  return "Unknown";
}

}  // namespace occutime
