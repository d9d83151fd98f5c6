#pragma once
// File formats. CSV floats are written with 17 significant digits; every
// writer has a reader that recovers the written values exactly.
//
//   density   t,value           one row per grid sample, t = k dt
//   spectrum  omega,re,im       one row per frequency sample, signed omega
//   region    re,im             one boundary sample per row
//   clicks    timestamp         one detection per row
//
// JSON documents: verdict, region_meta, clicks_meta.

#include <backaction/backaction.hpp>
#include <backaction/mcsim.hpp>
#include <backaction/spectral.hpp>

#include <json.hpp>

#include <filesystem>
#include <vector>

namespace backaction::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

void write_density_csv(const fs::path& path, const Density& d);
/// Infers the grid; t must start at 0 and be uniformly spaced to 1e-9 relative.
Density read_density_csv(const fs::path& path);

void write_spectrum_csv(const fs::path& path, const Spectrum& s);
Spectrum read_spectrum_csv(const fs::path& path);

void write_region_csv(const fs::path& path, const std::vector<complex>& boundary);
std::vector<complex> read_region_csv(const fs::path& path);

json region_meta_json(const ClassicalRegion& region);

json verdict_json(const ClassicalityVerdict& verdict);

/// Writes `timestamp` CSV plus a metadata sidecar.
void write_clickstream(const fs::path& csv_path, const fs::path& meta_path, const mcsim::ClickStream& clicks);
mcsim::ClickStream read_clickstream(const fs::path& csv_path, const fs::path& meta_path);

/// Pretty-printed with a trailing newline.
void write_json(const fs::path& path, const json& doc);
json read_json(const fs::path& path);

} // namespace backaction::io
