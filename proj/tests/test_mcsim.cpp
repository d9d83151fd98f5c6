#include "oracles.hpp"

#include <backaction/backaction.hpp>
#include <backaction/error.hpp>
#include <backaction/mcsim.hpp>

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace backaction;
using namespace backaction::mcsim;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

ClickStream manual_stream(std::vector<double> timestamps) {
  return ClickStream{SourceLaw(Periodic{1.0}), Efficiency(1.0), timestamps.size(), 0, 1, std::move(timestamps)};
}

} // namespace

TEST_CASE("simulation is deterministic in its configuration") {
  const auto law = SourceLaw::parse("gamma:2,1");
  const auto a = simulate(law, Efficiency(0.4), 20000, 7);
  const auto b = simulate(law, Efficiency(0.4), 20000, 7);
  CHECK(a.timestamps == b.timestamps);
  CHECK(simulate(law, Efficiency(0.4), 20000, 8).timestamps != a.timestamps);

  const auto s4 = simulate(law, Efficiency(0.4), 20001, 7, 4);
  CHECK(s4.timestamps == simulate(law, Efficiency(0.4), 20001, 7, 4).timestamps);
  CHECK(s4.shards == 4);
  CHECK(s4.n_emitted == 20001);
  CHECK(std::is_sorted(s4.timestamps.begin(), s4.timestamps.end()));
  CHECK(std::adjacent_find(s4.timestamps.begin(), s4.timestamps.end()) == s4.timestamps.end());

  CHECK(code_of([&] { simulate(law, Efficiency(0.4), 0, 7); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { simulate(law, Efficiency(0.4), 10, 7, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("perfect detector sees every emission") {
  for (unsigned shards : {1u, 3u}) {
    const auto c = simulate(SourceLaw::parse("uniform:0.5,1.5"), Efficiency(1.0), 12345, 1, shards);
    CHECK(c.timestamps.size() == 12345);
  }
}

TEST_CASE("detection count follows the binomial law") {
  const auto c = simulate(SourceLaw::parse("exponential:1"), Efficiency(0.3), 1'000'000, 1);
  CHECK(c.timestamps.size() >= 298625);
  CHECK(c.timestamps.size() <= 301375);
}

TEST_CASE("thinned lattice stays on the lattice") {
  const auto c = simulate(SourceLaw::parse("periodic:1"), Efficiency(0.5), 100000, 3);
  for (std::size_t i = 1; i < c.timestamps.size(); ++i) {
    const double gap = c.timestamps[i] - c.timestamps[i - 1];
    CHECK(gap >= 1.0);
    CHECK(gap == std::round(gap));
  }
}

TEST_CASE("histogram of identical intervals") {
  std::vector<double> ts(101);
  std::iota(ts.begin(), ts.end(), 0.0);
  const auto h = waiting_time_histogram(manual_stream(ts), TimeGrid(1000, 0.01));
  CHECK(h.intervals == 100);
  CHECK(h.overflow == 0);
  for (std::size_t k = 0; k < 1000; ++k) CHECK(h.density.values[k] == (k == 100 ? doctest::Approx(100.0) : 0.0));
  CHECK(h.density.mass() == doctest::Approx(1.0));

  const auto small = waiting_time_histogram(manual_stream(ts), TimeGrid(50, 0.01));
  CHECK(small.overflow == 100);
  CHECK(small.overflow_fraction() == 1.0);
  CHECK(small.density.mass() == 0.0);

  CHECK(code_of([] { waiting_time_histogram(manual_stream({1.0}), TimeGrid(10, 0.1)); }) ==
        ErrorCode::TooFewClicks);
  CHECK(code_of([] { interval_statistics(manual_stream({})); }) == ErrorCode::TooFewClicks);
}

TEST_CASE("interval statistics") {
  const auto s = interval_statistics(manual_stream({0.0, 1.0, 3.0, 6.0}));
  CHECK(s.count == 3);
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.stddev == doctest::Approx(1.0));
  CHECK(s.standard_error == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("comparison metrics") {
  const TimeGrid grid(2000, 0.01);
  const Density a = discretize(SourceLaw::parse("gamma:2,1"), grid);

  const auto same = compare(a, a);
  CHECK(same.l1 == 0.0);
  CHECK(same.linf == 0.0);
  CHECK(same.ks == 0.0);

  std::vector<double> shifted(grid.size(), 0.0);
  std::copy(a.values.begin(), a.values.end() - 1, shifted.begin() + 1);
  const auto m = compare(Density(grid, shifted), a);
  CHECK(m.ks == doctest::Approx(grid.dt() * a.peak()).epsilon(1e-9));

  CHECK(code_of([&] { compare(a, discretize(SourceLaw::parse("gamma:2,1"), TimeGrid(2000, 0.02))); }) ==
        ErrorCode::GridMismatch);
  CHECK(ks_critical_1pct(10000) == doctest::Approx(0.0163));
}

TEST_CASE("no overflow on a 20-mean horizon") {
  const double p = 0.5;
  const TimeGrid grid(4000, 20.0 / p / 4000.0);
  const auto c = simulate(SourceLaw::parse("exponential:1"), Efficiency(p), 1'000'000, 5);
  const auto h = waiting_time_histogram(c, grid);
  CHECK(h.overflow_fraction() < 1e-6);
}

TEST_CASE("thinned histograms match the analytic density") {
  for (const char* law_text : {"exponential:1", "gamma:2,1", "uniform:0.5,1.5", "periodic:1", "antibunch:5,1"}) {
    const auto law = SourceLaw::parse(law_text);
    for (double pv : {0.1, 0.3, 0.5, 1.0}) {
      CAPTURE(law_text);
      CAPTURE(pv);
      const Efficiency p(pv);
      const TimeGrid grid = default_grid(law, p);
      const auto clicks = simulate(law, p, 1'000'000, 99);
      const auto h = waiting_time_histogram(clicks, grid);
      CHECK(h.overflow_fraction() < 1e-6);

      const Density f = discretize(law, grid);
      const Density F = detected_density(f, p);
      if (pv == 1.0) CHECK(oracle::max_abs_diff(F.values, f.values) < 1e-12);
      const auto m = compare(h.density, F);
      CHECK(m.ks < ks_critical_1pct(h.intervals));

      const auto stats = interval_statistics(clicks);
      CHECK(std::abs(stats.mean - law.mean() / pv) < 3.0 * stats.standard_error + 1e-12);
    }
  }
}

TEST_CASE("sharded streams have the same law") {
  const auto law = SourceLaw::parse("exponential:1");
  const Efficiency p(0.5);
  const TimeGrid grid = default_grid(law, p);
  const auto clicks = simulate(law, p, 1'000'000, 123, 8);
  const auto h = waiting_time_histogram(clicks, grid);
  CHECK(compare(h.density, detected_density(discretize(law, grid), p)).ks < ks_critical_1pct(h.intervals));
}
