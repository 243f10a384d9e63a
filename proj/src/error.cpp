#include "scalefn/error.hpp"

namespace scalefn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotDilation: return "NotDilation";
    case ErrorCode::MaskSumViolation: return "MaskSumViolation";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::RootFindingFailure: return "RootFindingFailure";
    case ErrorCode::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorCode::IllConditionedTransform: return "IllConditionedTransform";
    case ErrorCode::NormNotContractive: return "NormNotContractive";
    case ErrorCode::ContractionSearchExhausted: return "ContractionSearchExhausted";
    case ErrorCode::NotDilation1D: return "NotDilation1D";
    case ErrorCode::NotDiagonal: return "NotDiagonal";
    case ErrorCode::NotDilationEigenvalue: return "NotDilationEigenvalue";
    case ErrorCode::NoBoundAvailable: return "NoBoundAvailable";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::NoUnitEigenvalue: return "NoUnitEigenvalue";
    case ErrorCode::NormalizationImpossible: return "NormalizationImpossible";
    case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

}  // namespace scalefn
