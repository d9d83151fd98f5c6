#include <backaction/error.hpp>

namespace backaction {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::InvalidDensity: return "InvalidDensity";
  case ErrorCode::InvalidSpectrum: return "InvalidSpectrum";
  case ErrorCode::NonHermitianSpectrum: return "NonHermitianSpectrum";
  case ErrorCode::DenominatorUnderflow: return "DenominatorUnderflow";
  case ErrorCode::HorizonTooShort: return "HorizonTooShort";
  case ErrorCode::ExactPole: return "ExactPole";
  case ErrorCode::TooFewClicks: return "TooFewClicks";
  case ErrorCode::GridMismatch: return "GridMismatch";
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::NonHermitianSpectrum:
  case ErrorCode::DenominatorUnderflow:
  case ErrorCode::HorizonTooShort:
  case ErrorCode::ExactPole:
    return ErrorCategory::Numeric;
  default:
    return ErrorCategory::Validation;
  }
}

} // namespace backaction
