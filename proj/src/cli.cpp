#include <backaction/cli.hpp>

#include <backaction/backaction.hpp>
#include <backaction/io.hpp>
#include <backaction/mcsim.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <sstream>

namespace backaction::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

json grid_json(const TimeGrid& g) { return json{{"n", g.size()}, {"dt", g.dt()}}; }

TimeGrid grid_for(const RunConfig& c, const mcsim::SourceLaw& law, Efficiency p) {
  return c.dt ? TimeGrid(c.n, *c.dt) : mcsim::default_grid(law, p, c.n);
}

// Source density from --in, else from --law on the configured grid.
Density emission_density(const RunConfig& c, Efficiency p, std::ostream& log, bool& from_law) {
  if (c.in) {
    from_law = false;
    return io::read_density_csv(*c.in);
  }
  from_law = true;
  const auto law = mcsim::SourceLaw::parse(c.law);
  const TimeGrid grid = grid_for(c, law, p);
  log << "discretized " << law.to_string() << " on n = " << grid.size() << ", dt = " << grid.dt() << '\n';
  return mcsim::discretize(law, grid);
}

int run_forward(const RunConfig& c, std::ostream& log) {
  const Efficiency p(c.p);
  bool from_law = false;
  const Density f = emission_density(c, p, log, from_law);
  const Spectrum phi = forward_transform(f, c.tolerances);
  const Spectrum Phi = detected_spectrum(phi, p, c.tolerances);
  const Density F = detected_density(f, p, c.tolerances);

  if (from_law) io::write_density_csv(c.out / "emitted_density.csv", f);
  io::write_density_csv(c.out / "detected_density.csv", F);
  io::write_spectrum_csv(c.out / "emitted_spectrum.csv", phi);
  io::write_spectrum_csv(c.out / "detected_spectrum.csv", Phi);
  log << "forward: mean waiting time " << f.mean() << " -> " << F.mean() << '\n';
  return Success;
}

int run_series(const RunConfig& c, std::ostream& log) {
  const Efficiency p(c.p);
  bool from_law = false;
  const Density f = emission_density(c, p, log, from_law);
  const Density FK = series_partial_sum(f, p, c.k, c.tolerances);
  const Density F = detected_density(f, p, c.tolerances);

  double gap = 0.0;
  for (std::size_t i = 0; i < F.values.size(); ++i) gap += std::abs(F.values[i] - FK.values[i]);
  gap *= f.grid.dt();
  const double tail_bound = std::pow(p.miss(), static_cast<double>(c.k + 1));

  io::write_density_csv(c.out / "series_density.csv", FK);
  io::write_json(c.out / "series_report.json", json{
                                                   {"K", c.k},
                                                   {"p", p.value()},
                                                   {"mass", FK.mass()},
                                                   {"l1_gap_vs_closed_form", gap},
                                                   {"tail_bound", tail_bound},
                                                   {"grid", grid_json(f.grid)},
                                               });
  log << "series: K = " << c.k << ", mass " << FK.mass() << ", L1 gap " << gap << " (bound " << tail_bound
      << ")\n";
  return Success;
}

int run_invert(const RunConfig& c, std::ostream& log) {
  const Efficiency p(c.p);
  const Density F = io::read_density_csv(*c.in);
  const auto emitted = emitted_spectrum(forward_transform(F, c.tolerances), p, c.tolerances);
  const Density f = inverse_transform(emitted.phi, c.tolerances);

  io::write_density_csv(c.out / "recovered_density.csv", f);
  io::write_json(c.out / "inversion_report.json", json{
                                                      {"p", p.value()},
                                                      {"pole_proximity", emitted.pole_proximity},
                                                      {"negativity_mass", f.negativity_mass()},
                                                      {"grid", grid_json(f.grid)},
                                                  });
  log << "invert: pole proximity " << emitted.pole_proximity << ", negativity mass " << f.negativity_mass()
      << '\n';
  return Success;
}

int run_classify(const RunConfig& c, std::ostream& log) {
  const Efficiency p(c.p);
  const Density F = io::read_density_csv(*c.in);
  const auto verdict = classify(F, p, ClassifyOptions{c.tau_neg, c.tau_pole, c.tolerances});
  io::write_json(c.out / "verdict.json", io::verdict_json(verdict));
  if (verdict.recovered_f) io::write_density_csv(c.out / "recovered_density.csv", *verdict.recovered_f);
  log << "classify: " << to_string(verdict.kind) << " (negativity mass " << verdict.negativity_mass
      << ", region violations " << verdict.region_violations.size() << ", pole proximity "
      << verdict.pole_proximity << ")\n";
  return Success;
}

int run_simulate(const RunConfig& c, std::ostream& log) {
  const Efficiency p(c.p);
  const auto law = mcsim::SourceLaw::parse(c.law);
  const TimeGrid grid = grid_for(c, law, p);

  const auto clicks = mcsim::simulate(law, p, c.emissions, c.seed, c.shards);
  const auto hist = mcsim::waiting_time_histogram(clicks, grid);
  const auto stats = mcsim::interval_statistics(clicks);
  const Density analytic = detected_density(mcsim::discretize(law, grid), p, c.tolerances);
  const auto metrics = mcsim::compare(hist.density, analytic);
  const double critical = mcsim::ks_critical_1pct(hist.intervals);

  io::write_clickstream(c.out / "clicks.csv", c.out / "clicks_meta.json", clicks);
  io::write_density_csv(c.out / "empirical_density.csv", hist.density);
  io::write_density_csv(c.out / "analytic_density.csv", analytic);
  io::write_json(c.out / "compare.json", json{
                                             {"l1", metrics.l1},
                                             {"linf", metrics.linf},
                                             {"ks", metrics.ks},
                                             {"ks_critical_1pct", critical},
                                             {"ks_pass", metrics.ks < critical},
                                             {"intervals", hist.intervals},
                                             {"overflow", hist.overflow},
                                             {"overflow_fraction", hist.overflow_fraction()},
                                             {"mean_interval", stats.mean},
                                             {"mean_expected", law.mean() / p.value()},
                                             {"standard_error", stats.standard_error},
                                             {"grid", grid_json(grid)},
                                         });
  log << "simulate: " << clicks.timestamps.size() << " detections of " << c.emissions << " emissions, KS "
      << metrics.ks << " (1% critical " << critical << ")\n";
  return Success;
}

int run_region(const RunConfig& c, std::ostream& log) {
  const Efficiency p(c.p);
  const auto region = classical_region(p);
  io::write_region_csv(c.out / "region.csv", region_boundary_samples(p, c.count));
  io::write_json(c.out / "region_meta.json", io::region_meta_json(region));
  log << "region: center " << region.center << ", radius " << region.radius << '\n';
  return Success;
}

} // namespace

void validate(const RunConfig& c) {
  (void)Efficiency(c.p);
  require(c.n >= 2, "--n must be at least 2");
  if (c.dt) require(std::isfinite(*c.dt) && *c.dt > 0.0, "--dt must be finite and positive");
  require(c.tau_neg >= 0.0, "--tau-neg must be nonnegative");
  require(c.tau_pole >= 0.0, "--tau-pole must be nonnegative");
  require(c.tolerances.norm > 0.0, "--eps-norm must be positive");
  require(c.tolerances.mag > 0.0, "--eps-mag must be positive");
  require(c.tolerances.neg >= 0.0, "--eps-neg must be nonnegative");
  require(c.tolerances.tail > 0.0, "--eps-tail must be positive");
  require(c.emissions >= 1, "--emissions must be at least 1");
  require(c.shards >= 1, "--shards must be at least 1");
  require(c.count >= 3, "--count must be at least 3");

  const bool needs_law = (c.subcommand == Subcommand::Simulate) ||
                         ((c.subcommand == Subcommand::Forward || c.subcommand == Subcommand::Series) && !c.in);
  if (needs_law) (void)mcsim::SourceLaw::parse(c.law);
  if (c.subcommand == Subcommand::Invert || c.subcommand == Subcommand::Classify) {
    require(c.in.has_value(), "--in is required for this subcommand");
  }
  if (c.in && !fs::exists(*c.in)) {
    throw Error(ErrorCode::IoError, "input file '" + c.in->string() + "' does not exist");
  }
}

int run(const RunConfig& config, std::ostream& log, std::ostream& diag) {
  try {
    validate(config);
    fs::create_directories(config.out);
    switch (config.subcommand) {
    case Subcommand::Forward: return run_forward(config, log);
    case Subcommand::Series: return run_series(config, log);
    case Subcommand::Invert: return run_invert(config, log);
    case Subcommand::Classify: return run_classify(config, log);
    case Subcommand::Simulate: return run_simulate(config, log);
    case Subcommand::Region: return run_region(config, log);
    }
    return UsageError;
  } catch (const Error& e) {
    diag << "error: " << e.what() << '\n';
    return category(e.code()) == ErrorCategory::Numeric ? NumericFailure : ValidationFailure;
  } catch (const fs::filesystem_error& e) {
    diag << "error: IoError: " << e.what() << '\n';
    return ValidationFailure;
  }
}

int main(int argc, const char* const* argv, std::ostream& log, std::ostream& diag) {
  RunConfig config;
  CLI::App app{"Detector back-action toolkit: thinned renewal densities, their inversion and a "
               "classical/nonclassical classifier"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  app.add_option("--p", config.p, "detection efficiency in (0, 1]");
  app.add_option("--n", config.n, "grid samples");
  app.add_option("--dt", config.dt, "grid step (default: auto, horizon = 25 mean detected waiting times)");
  app.add_option("--k", config.k, "series order K");
  app.add_option("--seed", config.seed, "simulation seed");
  app.add_option("--law", config.law,
                 "source law name:params (exponential:rate, gamma:shape,rate, uniform:lo,hi, periodic:period, "
                 "antibunch:gamma,mu)");
  app.add_option("--in", config.in, "input density CSV (t,value)");
  app.add_option("--out", config.out, "output directory");
  app.add_option("--tau-neg", config.tau_neg, "classifier threshold on recovered negativity mass");
  app.add_option("--tau-pole", config.tau_pole, "classifier threshold on pole proximity");
  app.add_option("--eps-norm", config.tolerances.norm, "normalization tolerance");
  app.add_option("--eps-mag", config.tolerances.mag, "spectral modulus / Hermitian tolerance");
  app.add_option("--eps-neg", config.tolerances.neg, "allowed negativity of input densities");
  app.add_option("--eps-tail", config.tolerances.tail, "mass allowed in the last 10% of the grid");
  app.add_option("--emissions", config.emissions, "simulated emissions");
  app.add_option("--shards", config.shards, "independent simulation sub-streams");
  app.add_option("--count", config.count, "region boundary samples");

  const std::pair<const char*, std::pair<Subcommand, const char*>> subcommands[] = {
      {"forward", {Subcommand::Forward, "emission density -> detected density and both spectra"}},
      {"series", {Subcommand::Series, "truncated convolution series of order --k"}},
      {"invert", {Subcommand::Invert, "detected density -> recovered emission density (unclipped)"}},
      {"classify", {Subcommand::Classify, "classical / nonclassical verdict for a detected density"}},
      {"simulate", {Subcommand::Simulate, "Monte Carlo click stream and comparison with the analytic density"}},
      {"region", {Subcommand::Region, "boundary of the classical region for --p"}},
  };
  for (const auto& [name, entry] : subcommands) {
    auto* sub = app.add_subcommand(name, entry.second);
    sub->fallthrough();
    sub->callback([&config, kind = entry.first] { config.subcommand = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, diag);
    return code == 0 ? Success : UsageError;
  }
  return run(config, log, diag);
}

} // namespace backaction::cli
