#include "oracles.hpp"

#include <backaction/cli.hpp>
#include <backaction/io.hpp>
#include <backaction/mcsim.hpp>

#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace backaction;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("backaction_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const char* name) const { return path / name; }
};

struct Outcome {
  int status;
  std::string log;
  std::string diag;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "backaction");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream log, diag;
  const int status = cli::main(static_cast<int>(argv.size()), argv.data(), log, diag);
  return {status, log.str(), diag.str()};
}

int run_process(const std::string& args) {
  const std::string cmd = std::string(BACKACTION_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

} // namespace

TEST_CASE("region subcommand") {
  TempDir dir;
  const auto r = run({"region", "--p", "0.5", "--out", dir.path.string()});
  REQUIRE(r.status == 0);
  const auto meta = io::read_json(dir / "region_meta.json");
  CHECK(meta.at("center").get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(meta.at("radius").get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(meta.at("p").get<double>() == 0.5);
  const auto pts = io::read_region_csv(dir / "region.csv");
  CHECK(pts.size() == 360);
  for (const auto& w : pts) CHECK(std::abs(std::abs(w - 1.0 / 3.0) - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("forward at p = 1 reproduces its input") {
  TempDir dir;
  REQUIRE(run({"forward", "--p", "1", "--law", "gamma:2,1", "--out", dir.path.string()}).status == 0);
  const Density f = io::read_density_csv(dir / "emitted_density.csv");
  const Density F = io::read_density_csv(dir / "detected_density.csv");
  CHECK(oracle::max_abs_diff(F.values, f.values) < 1e-12);

  TempDir second;
  REQUIRE(run({"forward", "--p", "1", "--in", (dir / "emitted_density.csv").string(), "--out",
               second.path.string()})
              .status == 0);
  CHECK_FALSE(fs::exists(second / "emitted_density.csv"));
  CHECK(oracle::max_abs_diff(io::read_density_csv(second / "detected_density.csv").values, f.values) < 1e-12);
  const Spectrum phi = io::read_spectrum_csv(second / "emitted_spectrum.csv");
  const Spectrum Phi = io::read_spectrum_csv(second / "detected_spectrum.csv");
  CHECK(phi.values == Phi.values);
}

TEST_CASE("forward then classify is classical across the corpus") {
  for (const char* law : {"exponential:1", "gamma:2,1", "uniform:0.5,1.5", "periodic:1", "antibunch:5,1"}) {
    for (const char* p : {"0.1", "0.3", "0.9"}) {
      CAPTURE(law);
      CAPTURE(p);
      TempDir dir;
      REQUIRE(run({"forward", "--p", p, "--law", law, "--out", dir.path.string()}).status == 0);
      const auto r =
          run({"classify", "--p", p, "--in", (dir / "detected_density.csv").string(), "--out", dir.path.string()});
      REQUIRE(r.status == 0);
      const auto verdict = io::read_json(dir / "verdict.json");
      CHECK(verdict.at("kind") == "classical");
      CHECK(verdict.at("region_violations").empty());
      CHECK(verdict.at("negativity_mass").get<double>() < 1e-6);
      // The recovered density is the emission density again.
      const Density f = io::read_density_csv(dir / "emitted_density.csv");
      const Density back = io::read_density_csv(dir / "recovered_density.csv");
      CHECK(oracle::max_abs_diff(back.values, f.values) < 1e-9);
    }
  }
}

TEST_CASE("nonclassical verdicts are successful runs") {
  TempDir dir;
  const TimeGrid grid(4096, 0.01);
  io::write_density_csv(dir / "F.csv", mcsim::discretize(mcsim::SourceLaw::parse("antibunch:5,1"), grid));
  const auto r = run({"classify", "--p", "0.05", "--in", (dir / "F.csv").string(), "--out", dir.path.string()});
  CHECK(r.status == 0);
  const auto verdict = io::read_json(dir / "verdict.json");
  CHECK(verdict.at("kind") == "nonclassical");
  CHECK(verdict.at("negativity_mass").get<double>() > 1e-3);
  CHECK(verdict.at("evidence").at("recovered_f_available") == true);
  CHECK(io::read_density_csv(dir / "recovered_density.csv").negativity_mass() ==
        doctest::Approx(verdict.at("negativity_mass").get<double>()));

  // Same file with a stricter threshold still succeeds.
  CHECK(run({"classify", "--p", "0.05", "--tau-neg", "10", "--in", (dir / "F.csv").string(), "--out",
             dir.path.string()})
            .status == 0);
}

TEST_CASE("series and invert reports") {
  TempDir dir;
  REQUIRE(run({"forward", "--p", "0.5", "--law", "exponential:1", "--out", dir.path.string()}).status == 0);
  REQUIRE(run({"series", "--p", "0.5", "--k", "3", "--in", (dir / "emitted_density.csv").string(), "--out",
               dir.path.string()})
              .status == 0);
  const auto report = io::read_json(dir / "series_report.json");
  CHECK(report.at("K") == 3);
  CHECK(report.at("mass").get<double>() == doctest::Approx(0.9375).epsilon(1e-6));
  CHECK(report.at("tail_bound").get<double>() == 0.0625);
  CHECK(report.at("l1_gap_vs_closed_form").get<double>() <= 0.0625 + 1e-6);
  CHECK(io::read_density_csv(dir / "series_density.csv").grid.size() == 4096);

  REQUIRE(run({"invert", "--p", "0.5", "--in", (dir / "detected_density.csv").string(), "--out",
               dir.path.string()})
              .status == 0);
  const auto inv = io::read_json(dir / "inversion_report.json");
  CHECK(inv.at("pole_proximity").get<double>() > 0.5);
  CHECK(inv.at("negativity_mass").get<double>() < 1e-6);
  const Density f = io::read_density_csv(dir / "emitted_density.csv");
  CHECK(oracle::max_abs_diff(io::read_density_csv(dir / "recovered_density.csv").values, f.values) < 1e-9);
}

TEST_CASE("simulate writes a passing comparison") {
  TempDir dir;
  REQUIRE(run({"simulate", "--p", "0.5", "--law", "exponential:1", "--emissions", "200000", "--seed", "4",
               "--out", dir.path.string()})
              .status == 0);
  const auto cmp = io::read_json(dir / "compare.json");
  CHECK(cmp.at("ks_pass") == true);
  CHECK(cmp.at("ks").get<double>() < cmp.at("ks_critical_1pct").get<double>());
  CHECK(cmp.at("overflow") == 0);
  const auto clicks = io::read_clickstream(dir / "clicks.csv", dir / "clicks_meta.json");
  CHECK(clicks.seed == 4);
  CHECK(clicks.n_emitted == 200000);
  CHECK(cmp.at("intervals").get<std::size_t>() == clicks.timestamps.size() - 1);
  CHECK(io::read_density_csv(dir / "empirical_density.csv").grid ==
        io::read_density_csv(dir / "analytic_density.csv").grid);
}

TEST_CASE("exit statuses") {
  TempDir dir;
  const std::string out = dir.path.string();
  CHECK(run({}).status == cli::UsageError);
  CHECK(run({"--help"}).status == cli::Success);
  CHECK(run({"launch"}).status == cli::UsageError);
  CHECK(run({"region", "--bogus", "1"}).status == cli::UsageError);
  CHECK(run({"region", "--p", "abc"}).status == cli::UsageError);

  const auto bad_p = run({"region", "--p", "2", "--out", out});
  CHECK(bad_p.status == cli::ValidationFailure);
  CHECK(bad_p.diag.find("InvalidArgument") != std::string::npos);
  CHECK(run({"classify", "--p", "0.5", "--out", out}).status == cli::ValidationFailure);
  CHECK(run({"classify", "--in", (dir / "none.csv").string(), "--out", out}).status == cli::ValidationFailure);
  CHECK(run({"simulate", "--law", "cauchy:1", "--out", out}).status == cli::ValidationFailure);
  CHECK(run({"forward", "--n", "1", "--out", out}).status == cli::ValidationFailure);

  // A density that fits its grid at p = 1 overflows it at p = 0.05.
  REQUIRE(run({"forward", "--p", "1", "--law", "exponential:1", "--out", out}).status == 0);
  const auto numeric = run({"forward", "--p", "0.05", "--in", (dir / "emitted_density.csv").string(), "--out", out});
  CHECK(numeric.status == cli::NumericFailure);
  CHECK(numeric.diag.find("HorizonTooShort") != std::string::npos);
}

TEST_CASE("installed binary") {
  TempDir dir;
  const std::string out = " --out " + dir.path.string();
  CHECK(run_process("region --p 0.25" + out) == 0);
  CHECK(fs::exists(dir / "region_meta.json"));
  CHECK(run_process("region --p 0" + out) == 3);
  CHECK(run_process("" + out) == 2);
  CHECK(run_process("--help") == 0);
}
