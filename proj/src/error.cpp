#include "fairalloc/error.hpp"

namespace fairalloc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyRowOrColumn: return "EmptyRowOrColumn";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::NonPositiveCoordinate: return "NonPositiveCoordinate";
    case ErrorCode::NegativeCoordinate: return "NegativeCoordinate";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::InvalidAlpha: return "InvalidAlpha";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnsupportedStructure: return "UnsupportedStructure";
    case ErrorCode::TruncationDomainViolation: return "TruncationDomainViolation";
    case ErrorCode::FeasibilityViolation: return "FeasibilityViolation";
    case ErrorCode::CertificateShortfall: return "CertificateShortfall";
    case ErrorCode::LocalityViolation: return "LocalityViolation";
    case ErrorCode::MissingLoad: return "MissingLoad";
    case ErrorCode::DualDomainError: return "DualDomainError";
    case ErrorCode::NonConvergence: return "NonConvergence";
  }
  return "Unknown";
}

bool is_internal(ErrorCode code) {
  switch (code) {
    case ErrorCode::TruncationDomainViolation:
    case ErrorCode::FeasibilityViolation:
    case ErrorCode::CertificateShortfall:
    case ErrorCode::LocalityViolation:
    case ErrorCode::MissingLoad:
    case ErrorCode::NonConvergence:
      return true;
    default:
      return false;
  }
}

}  // namespace fairalloc
