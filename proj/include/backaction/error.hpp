#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace backaction {

enum class ErrorCode {
  InvalidArgument,
  InvalidDensity,
  InvalidSpectrum,
  NonHermitianSpectrum,
  DenominatorUnderflow,
  HorizonTooShort,
  ExactPole,
  TooFewClicks,
  GridMismatch,
  ParseError,
  IoError,
};

/// Coarse classification used by the command-line front end to pick an exit status.
enum class ErrorCategory { Validation, Numeric };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace backaction
