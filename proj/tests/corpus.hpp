#pragma once
// Emission densities shared by the suites: exponential, gamma of shape 2,
// uniform on an interval, and a point mass smoothed over three bins.

#include <backaction/backaction.hpp>
#include <backaction/source_law.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace corpus {

struct Entry {
  std::string name;
  backaction::Density f;
};

inline backaction::Density smoothed_point_mass(double t0, const backaction::TimeGrid& grid) {
  std::vector<double> v(grid.size(), 0.0);
  const auto k0 = static_cast<std::size_t>(std::lround(t0 / grid.dt()));
  for (std::size_t k = k0 - 1; k <= k0 + 1; ++k) v[k] = 1.0 / (3.0 * grid.dt());
  return backaction::Density(grid, std::move(v));
}

/// Corpus on grids sized for efficiency p (horizon of 25 mean detected intervals).
inline std::vector<Entry> densities(backaction::Efficiency p, std::size_t n = 4096) {
  using backaction::mcsim::SourceLaw;
  std::vector<Entry> out;
  for (const char* law_text : {"exponential:1", "gamma:2,1", "uniform:0.5,1.5"}) {
    const auto law = SourceLaw::parse(law_text);
    out.push_back({law_text, backaction::mcsim::discretize(law, backaction::mcsim::default_grid(law, p, n))});
  }
  const auto lattice = SourceLaw::parse("periodic:1");
  out.push_back({"point-mass:1", smoothed_point_mass(1.0, backaction::mcsim::default_grid(lattice, p, n))});
  return out;
}

} // namespace corpus
