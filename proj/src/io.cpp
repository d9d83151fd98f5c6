#include <backaction/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

namespace backaction::io {
namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return is;
}

// Appends x with 17 significant digits.
void put(std::string& line, double x) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  line.append(buf, static_cast<std::size_t>(len));
}

void finish(std::ofstream& os, const fs::path& path) {
  os.flush();
  if (!os) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

// Rows of a numeric CSV with the given header.
std::vector<std::vector<double>> read_csv(const fs::path& path, std::string_view header) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || trim(line) != header) {
    throw Error(ErrorCode::ParseError, "'" + path.string() + "' must start with header '" +
                                           std::string(header) + "'");
  }
  const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view rest = trim(line);
    if (rest.empty()) continue;
    std::vector<double> row;
    row.reserve(columns);
    for (;;) {
      const auto comma = rest.find(',');
      const auto field = trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) +
                                               ": bad number '" + std::string(field) + "'");
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row.size() != columns) {
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(columns) + " columns, got " +
                                             std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Recovers dt from sample times t_k = k dt. Prefers t_1 when it reproduces
// every row exactly (files written by this library), otherwise fits.
TimeGrid infer_grid(const std::vector<double>& t, const fs::path& path) {
  const std::size_t n = t.size();
  if (n < 2) {
    throw Error(ErrorCode::ParseError, "'" + path.string() + "' needs at least 2 samples");
  }
  double dt = t[1] - t[0];
  bool exact = t[0] == 0.0;
  for (std::size_t k = 0; exact && k < n; ++k) exact = t[k] == static_cast<double>(k) * dt;
  if (!exact) dt = (t[n - 1] - t[0]) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) {
    throw Error(ErrorCode::InvalidDensity, "'" + path.string() + "': t must be strictly increasing");
  }
  if (std::abs(t[0]) > 1e-9 * dt) {
    throw Error(ErrorCode::InvalidDensity, "'" + path.string() + "': causality requires the first sample at t = 0");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(t[k] - static_cast<double>(k) * dt) > 1e-9 * dt) {
      std::ostringstream os;
      os << "'" << path.string() << "': sample times are not uniform (row " << k + 1 << ", t = " << t[k]
         << ", expected " << static_cast<double>(k) * dt << ")";
      throw Error(ErrorCode::InvalidDensity, os.str());
    }
  }
  return TimeGrid(n, dt);
}

} // namespace

void write_density_csv(const fs::path& path, const Density& d) {
  auto os = open_out(path);
  std::string out = "t,value\n";
  out.reserve(out.size() + d.values.size() * 48);
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    put(out, d.grid.time(k));
    out += ',';
    put(out, d.values[k]);
    out += '\n';
  }
  os << out;
  finish(os, path);
}

Density read_density_csv(const fs::path& path) {
  const auto rows = read_csv(path, "t,value");
  std::vector<double> t(rows.size());
  std::vector<double> v(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    t[k] = rows[k][0];
    v[k] = rows[k][1];
  }
  return Density(infer_grid(t, path), std::move(v));
}

void write_spectrum_csv(const fs::path& path, const Spectrum& s) {
  auto os = open_out(path);
  std::string out = "omega,re,im\n";
  out.reserve(out.size() + s.values.size() * 72);
  for (std::size_t m = 0; m < s.values.size(); ++m) {
    put(out, s.grid.omega(m));
    out += ',';
    put(out, s.values[m].real());
    out += ',';
    put(out, s.values[m].imag());
    out += '\n';
  }
  os << out;
  finish(os, path);
}

Spectrum read_spectrum_csv(const fs::path& path) {
  const auto rows = read_csv(path, "omega,re,im");
  if (rows.size() < 2) {
    throw Error(ErrorCode::ParseError, "'" + path.string() + "' needs at least 2 frequency samples");
  }
  const double n = static_cast<double>(rows.size());
  const double omega1 = rows[1][0];
  if (!(omega1 > 0.0)) {
    throw Error(ErrorCode::ParseError, "'" + path.string() + "': second row must carry the fundamental frequency");
  }
  const TimeGrid grid(rows.size(), 2.0 * std::numbers::pi / (n * omega1));
  std::vector<complex> values(rows.size());
  for (std::size_t m = 0; m < rows.size(); ++m) {
    if (std::abs(rows[m][0] - grid.omega(m)) > 1e-9 * std::max(1.0, std::abs(grid.omega(m)))) {
      throw Error(ErrorCode::ParseError, "'" + path.string() + "': frequency column is not the DFT layout at row " +
                                             std::to_string(m + 1));
    }
    values[m] = {rows[m][1], rows[m][2]};
  }
  return Spectrum(grid, std::move(values));
}

void write_region_csv(const fs::path& path, const std::vector<complex>& boundary) {
  auto os = open_out(path);
  std::string out = "re,im\n";
  for (const auto& w : boundary) {
    put(out, w.real());
    out += ',';
    put(out, w.imag());
    out += '\n';
  }
  os << out;
  finish(os, path);
}

std::vector<complex> read_region_csv(const fs::path& path) {
  const auto rows = read_csv(path, "re,im");
  std::vector<complex> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.emplace_back(r[0], r[1]);
  return out;
}

json region_meta_json(const ClassicalRegion& region) {
  return json{{"p", region.p.value()}, {"center", region.center}, {"radius", region.radius}};
}

json verdict_json(const ClassicalityVerdict& verdict) {
  json violations = json::array();
  for (const auto& v : verdict.region_violations) {
    violations.push_back(
        json{{"omega", v.omega}, {"phi_re", v.value.real()}, {"phi_im", v.value.imag()}, {"excess", v.excess}});
  }
  return json{
      {"kind", to_string(verdict.kind)},
      {"negativity_mass", verdict.negativity_mass},
      {"pole_proximity", verdict.pole_proximity},
      {"region_violations", std::move(violations)},
      {"p", verdict.p.value()},
      {"grid", json{{"n", verdict.grid.size()}, {"dt", verdict.grid.dt()}}},
      {"thresholds", json{{"tau_neg", verdict.tau_neg}, {"tau_pole", verdict.tau_pole}}},
      {"evidence",
       json{{"region_test_classical", verdict.region_test_classical()},
            {"inversion_test_classical", verdict.inversion_test_classical()},
            {"recovered_f_available", verdict.recovered_f.has_value()}}},
  };
}

void write_clickstream(const fs::path& csv_path, const fs::path& meta_path, const mcsim::ClickStream& clicks) {
  {
    auto os = open_out(csv_path);
    std::string out = "timestamp\n";
    out.reserve(out.size() + clicks.timestamps.size() * 25);
    for (double t : clicks.timestamps) {
      put(out, t);
      out += '\n';
    }
    os << out;
    finish(os, csv_path);
  }
  write_json(meta_path, json{
                            {"law", clicks.law.name()},
                            {"params", clicks.law.parameters()},
                            {"p", clicks.p.value()},
                            {"n_emitted", clicks.n_emitted},
                            {"seed", clicks.seed},
                            {"shards", clicks.shards},
                        });
}

mcsim::ClickStream read_clickstream(const fs::path& csv_path, const fs::path& meta_path) {
  const json meta = read_json(meta_path);
  try {
    std::string law_text = meta.at("law").get<std::string>() + ":";
    const auto params = meta.at("params").get<std::vector<double>>();
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) law_text += ',';
      put(law_text, params[i]);
    }
    mcsim::ClickStream clicks{mcsim::SourceLaw::parse(law_text),
                              Efficiency(meta.at("p").get<double>()),
                              meta.at("n_emitted").get<std::uint64_t>(),
                              meta.at("seed").get<std::uint64_t>(),
                              meta.at("shards").get<unsigned>(),
                              {}};
    const auto rows = read_csv(csv_path, "timestamp");
    clicks.timestamps.reserve(rows.size());
    for (const auto& r : rows) {
      if (!clicks.timestamps.empty() && !(r[0] > clicks.timestamps.back())) {
        throw Error(ErrorCode::ParseError, "'" + csv_path.string() + "': timestamps must be strictly increasing");
      }
      clicks.timestamps.push_back(r[0]);
    }
    return clicks;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "'" + meta_path.string() + "': " + e.what());
  }
}

void write_json(const fs::path& path, const json& doc) {
  auto os = open_out(path);
  os << doc.dump(2) << '\n';
  finish(os, path);
}

json read_json(const fs::path& path) {
  auto is = open_in(path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "'" + path.string() + "': " + e.what());
  }
}

} // namespace backaction::io
