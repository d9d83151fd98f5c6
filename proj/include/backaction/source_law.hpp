#pragma once

#include <backaction/backaction.hpp>
#include <backaction/spectral.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace backaction::mcsim {

struct Exponential {
  double rate;
};
struct Gamma {
  double shape;
  double rate;
};
struct Uniform {
  double lo;
  double hi;
};
/// Deterministic inter-emission interval (a lattice source).
struct Periodic {
  double period;
};
/// C (1 - exp(-gamma t)) exp(-mu t): vanishes at zero delay.
struct AntibunchShaped {
  double gamma;
  double mu;
};

/// Inter-emission waiting-time law of a stationary renewal source.
class SourceLaw {
public:
  using Kind = std::variant<Exponential, Gamma, Uniform, Periodic, AntibunchShaped>;

  /// Throws InvalidArgument unless every parameter is finite and positive (and lo < hi).
  explicit SourceLaw(Kind kind);

  /// Parses "name:a[,b]", e.g. "exponential:1", "gamma:2,1", "uniform:0.5,1.5",
  /// "periodic:1", "antibunch:5,1".
  static SourceLaw parse(std::string_view law_text);

  const Kind& kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;
  std::vector<double> parameters() const;
  /// Canonical "name:params" form accepted by parse().
  std::string to_string() const;

  double mean() const noexcept;
  /// P(X >= t).
  double survival(double t) const;
  bool is_lattice() const noexcept { return std::holds_alternative<Periodic>(kind_); }

private:
  Kind kind_;
};

/// Sample k carries the law's mass on [t_k - dt/2, t_k + dt/2) (the first cell
/// is [0, dt/2)) divided by dt. Matches nearest-grid-point histogramming.
Density discretize(const SourceLaw& law, const TimeGrid& grid);

/// Grid of n samples whose horizon spans `coverage` mean detected waiting
/// times, mean(law) / p. Lattice laws get a dt dividing the period.
TimeGrid default_grid(const SourceLaw& law, Efficiency p, std::size_t n = 4096, double coverage = 25.0);

/// 64-bit Mersenne Twister with portable transforms; the std distributions
/// are implementation-defined, these are not.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double exponential(double rate) noexcept;
  double normal() noexcept;
  double gamma(double shape, double rate) noexcept;

private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent shard seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Draws inter-emission intervals from a SourceLaw. AntibunchShaped uses an
/// inverse-CDF table of 2^16 points with linear interpolation.
class IntervalSampler {
public:
  explicit IntervalSampler(const SourceLaw& law);

  double operator()(Rng& rng) const;

  static constexpr std::size_t table_size = std::size_t{1} << 16;

private:
  SourceLaw law_;
  std::vector<double> table_t_;
  std::vector<double> table_cdf_;
};

} // namespace backaction::mcsim
