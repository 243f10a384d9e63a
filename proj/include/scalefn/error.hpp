#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scalefn {

enum class ErrorCode {
  ParseError,
  DimensionMismatch,
  NotDilation,
  MaskSumViolation,
  EmptyMask,
  SingularMatrix,
  RootFindingFailure,
  ComplexSpectrum,
  IllConditionedTransform,
  NormNotContractive,
  ContractionSearchExhausted,
  NotDilation1D,
  NotDiagonal,
  NotDilationEigenvalue,
  NoBoundAvailable,
  DomainTooSmall,
  NoUnitEigenvalue,
  NormalizationImpossible,
  Overflow,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scalefn
