#pragma once
// Monte Carlo oracle for the thinned renewal process: emit, drop each
// particle with probability 1 - p, histogram the intervals between
// consecutive detections.

#include <backaction/backaction.hpp>
#include <backaction/source_law.hpp>
#include <backaction/spectral.hpp>

#include <cstdint>
#include <vector>

namespace backaction::mcsim {

struct ClickStream {
  SourceLaw law;
  Efficiency p;
  std::uint64_t n_emitted;
  std::uint64_t seed;
  unsigned shards;
  /// Detection times, strictly increasing.
  std::vector<double> timestamps;
};

/// Deterministic in (law, p, n_emitted, seed, shards). Shard s draws its
/// block of emissions from its own generator seeded by splitmix64 of the
/// base seed; blocks are laid end to end in shard order.
ClickStream simulate(const SourceLaw& law, Efficiency p, std::uint64_t n_emitted, std::uint64_t seed,
                     unsigned shards = 1);

struct WaitingTimeHistogram {
  /// Empirical density; integrates to 1 - overflow_fraction().
  Density density;
  std::uint64_t intervals;
  /// Intervals whose nearest grid point lies beyond the horizon.
  std::uint64_t overflow;

  double overflow_fraction() const noexcept {
    return static_cast<double>(overflow) / static_cast<double>(intervals);
  }
};

/// Each interval tau is counted in bin round(tau / dt). Throws TooFewClicks
/// with fewer than two detections.
WaitingTimeHistogram waiting_time_histogram(const ClickStream& clicks, const TimeGrid& grid);

struct IntervalStatistics {
  std::uint64_t count;
  double mean;
  double stddev;
  double standard_error;
};

IntervalStatistics interval_statistics(const ClickStream& clicks);

struct ComparisonMetrics {
  double l1;
  double linf; ///< max |e - a| / max a
  double ks;   ///< max |CDF_e - CDF_a| with CDFs as cumulative sums times dt
};

/// Throws GridMismatch when the grids differ.
ComparisonMetrics compare(const Density& empirical, const Density& analytic);

/// One-sample Kolmogorov-Smirnov critical value at the 1% level, 1.63 / sqrt(n).
double ks_critical_1pct(std::uint64_t n) noexcept;

} // namespace backaction::mcsim
