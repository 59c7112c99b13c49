#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairalloc {

enum class ErrorCode {
  // input validation
  EmptyRowOrColumn,
  NegativeEntry,
  AllZero,
  DuplicateEntry,
  NonPositiveCoordinate,
  NegativeCoordinate,
  DomainError,
  DimensionMismatch,
  EpsilonOutOfRange,
  InvalidAlpha,
  ParseError,
  IoError,
  UnsupportedStructure,
  // solver internals; any of these indicates a bug, not bad input
  TruncationDomainViolation,
  FeasibilityViolation,
  CertificateShortfall,
  LocalityViolation,
  MissingLoad,
  DualDomainError,
  NonConvergence,
};

std::string_view to_string(ErrorCode code);

/// True for the codes that signal a broken solver invariant rather than bad input.
bool is_internal(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairalloc
