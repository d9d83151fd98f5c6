#include <backaction/mcsim.hpp>

#include <algorithm>
#include <cmath>
#include <thread>

namespace backaction::mcsim {
namespace {

struct ShardResult {
  std::vector<double> local_times; // detection times relative to the shard start
  double duration = 0.0;           // time of the shard's last emission
};

ShardResult run_shard(const IntervalSampler& sampler, double p, std::uint64_t count, std::uint64_t seed) {
  Rng rng(seed);
  ShardResult r;
  r.local_times.reserve(static_cast<std::size_t>(static_cast<double>(count) * p * 1.01) + 16);
  double t = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    t += sampler(rng);
    if (rng.uniform() < p) r.local_times.push_back(t);
  }
  r.duration = t;
  return r;
}

} // namespace

ClickStream simulate(const SourceLaw& law, Efficiency p, std::uint64_t n_emitted, std::uint64_t seed,
                     unsigned shards) {
  if (n_emitted < 1) {
    throw Error(ErrorCode::InvalidArgument, "simulation needs at least one emission");
  }
  if (shards < 1) {
    throw Error(ErrorCode::InvalidArgument, "simulation needs at least one shard");
  }
  const IntervalSampler sampler(law);

  std::vector<ShardResult> results(shards);
  const std::uint64_t base = n_emitted / shards;
  const std::uint64_t extra = n_emitted % shards;
  auto shard_count = [&](unsigned s) { return base + (s < extra ? 1 : 0); };
  auto shard_seed = [&](unsigned s) { return splitmix64(seed + 0x9e3779b97f4a7c15ULL * s); };

  if (shards == 1) {
    results[0] = run_shard(sampler, p.value(), n_emitted, shard_seed(0));
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(shards);
    for (unsigned s = 0; s < shards; ++s) {
      workers.emplace_back([&, s] { results[s] = run_shard(sampler, p.value(), shard_count(s), shard_seed(s)); });
    }
  }

  ClickStream clicks{law, p, n_emitted, seed, shards, {}};
  std::size_t total = 0;
  for (const auto& r : results) total += r.local_times.size();
  clicks.timestamps.reserve(total);
  double offset = 0.0;
  for (const auto& r : results) {
    for (double t : r.local_times) clicks.timestamps.push_back(offset + t);
    offset += r.duration;
  }
  return clicks;
}

WaitingTimeHistogram waiting_time_histogram(const ClickStream& clicks, const TimeGrid& grid) {
  const auto& ts = clicks.timestamps;
  if (ts.size() < 2) {
    throw Error(ErrorCode::TooFewClicks, "need at least 2 detections to form an interval, got " +
                                             std::to_string(ts.size()));
  }
  std::vector<std::uint64_t> counts(grid.size(), 0);
  std::uint64_t overflow = 0;
  const double limit = static_cast<double>(grid.size());
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double bin = std::round((ts[i] - ts[i - 1]) / grid.dt());
    if (bin >= limit) {
      ++overflow;
    } else {
      ++counts[static_cast<std::size_t>(bin)];
    }
  }
  const std::uint64_t intervals = ts.size() - 1;
  const double scale = 1.0 / (static_cast<double>(intervals) * grid.dt());
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = static_cast<double>(counts[k]) * scale;
  return WaitingTimeHistogram{Density(grid, std::move(values)), intervals, overflow};
}

IntervalStatistics interval_statistics(const ClickStream& clicks) {
  const auto& ts = clicks.timestamps;
  if (ts.size() < 2) {
    throw Error(ErrorCode::TooFewClicks, "need at least 2 detections to form an interval, got " +
                                             std::to_string(ts.size()));
  }
  // Welford, in index order.
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t n = 0;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double x = ts[i] - ts[i - 1];
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  const double sd = std::sqrt(var);
  return IntervalStatistics{n, mean, sd, sd / std::sqrt(static_cast<double>(n))};
}

ComparisonMetrics compare(const Density& empirical, const Density& analytic) {
  if (!(empirical.grid == analytic.grid)) {
    throw Error(ErrorCode::GridMismatch, "empirical and analytic densities live on different grids");
  }
  const double dt = analytic.grid.dt();
  double l1 = 0.0;
  double diff_max = 0.0;
  double ks = 0.0;
  double cdf_e = 0.0;
  double cdf_a = 0.0;
  for (std::size_t k = 0; k < analytic.values.size(); ++k) {
    const double e = empirical.values[k];
    const double a = analytic.values[k];
    l1 += std::abs(e - a);
    diff_max = std::max(diff_max, std::abs(e - a));
    cdf_e += e;
    cdf_a += a;
    ks = std::max(ks, std::abs(cdf_e - cdf_a) * dt);
  }
  const double peak = analytic.peak();
  return ComparisonMetrics{l1 * dt, peak > 0.0 ? diff_max / peak : diff_max, ks};
}

double ks_critical_1pct(std::uint64_t n) noexcept { return 1.63 / std::sqrt(static_cast<double>(n)); }

} // namespace backaction::mcsim
