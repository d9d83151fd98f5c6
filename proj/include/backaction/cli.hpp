#pragma once

#include <backaction/spectral.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace backaction::cli {

enum class Subcommand { Forward, Series, Invert, Classify, Simulate, Region };

enum ExitStatus : int {
  Success = 0,
  UsageError = 2,
  ValidationFailure = 3,
  NumericFailure = 4,
};

struct RunConfig {
  Subcommand subcommand = Subcommand::Region;
  double p = 0.5;
  std::size_t n = 4096;
  std::optional<double> dt;  ///< unset: span 25 mean detected waiting times
  std::size_t k = 20;
  std::uint64_t seed = 1;
  std::string law = "exponential:1";
  std::optional<std::filesystem::path> in;
  std::filesystem::path out = ".";
  double tau_neg = 1e-3;
  double tau_pole = 1e-6;
  Tolerances tolerances{};
  std::uint64_t emissions = 1'000'000;
  unsigned shards = 1;
  std::size_t count = 360;
};

/// Throws InvalidArgument naming the offending field.
void validate(const RunConfig& config);

/// Runs one subcommand; progress goes to `log`, failures to `diag`.
int run(const RunConfig& config, std::ostream& log, std::ostream& diag);

/// Parses argv and runs.
int main(int argc, const char* const* argv, std::ostream& log, std::ostream& diag);

} // namespace backaction::cli
