#include "quadue/error.hpp"

namespace quadue {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateRange: return "DegenerateRange";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::IterationLimit: return "IterationLimit";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::EmptyPolytope: return "EmptyPolytope";
    case ErrorKind::DegenerateCurvature: return "DegenerateCurvature";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::DegenerateSpread: return "DegenerateSpread";
    case ErrorKind::CatalogExhausted: return "CatalogExhausted";
    case ErrorKind::NoValidPoint: return "NoValidPoint";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InfeasibleInstance: return "InfeasibleInstance";
  }
  return "Unknown";
}

}  // namespace quadue
