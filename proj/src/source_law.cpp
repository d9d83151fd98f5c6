#include <backaction/source_law.hpp>

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace backaction::mcsim {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void require_positive(std::string_view law, std::string_view field, double x) {
  if (!positive(x)) {
    std::ostringstream os;
    os << law << " law needs a finite positive " << field << ", got " << x;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

std::vector<double> parse_numbers(std::string_view text, std::string_view law_text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto token = text.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
      throw Error(ErrorCode::ParseError, "bad number '" + std::string(token) + "' in law '" +
                                             std::string(law_text) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Normalization of C (1 - e^{-gamma t}) e^{-mu t}.
double antibunch_norm(const AntibunchShaped& a) { return a.mu * (a.gamma + a.mu) / a.gamma; }

} // namespace

SourceLaw::SourceLaw(Kind kind) : kind_(kind) {
  std::visit(overloaded{
                 [](const Exponential& e) { require_positive("exponential", "rate", e.rate); },
                 [](const Gamma& g) {
                   require_positive("gamma", "shape", g.shape);
                   require_positive("gamma", "rate", g.rate);
                 },
                 [](const Uniform& u) {
                   require_positive("uniform", "lo", u.lo);
                   require_positive("uniform", "hi", u.hi);
                   if (!(u.lo < u.hi)) {
                     throw Error(ErrorCode::InvalidArgument, "uniform law needs lo < hi");
                   }
                 },
                 [](const Periodic& p) { require_positive("periodic", "period", p.period); },
                 [](const AntibunchShaped& a) {
                   require_positive("antibunch", "gamma", a.gamma);
                   require_positive("antibunch", "mu", a.mu);
                 },
             },
             kind_);
}

SourceLaw SourceLaw::parse(std::string_view law_text) {
  const auto colon = law_text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::ParseError, "law '" + std::string(law_text) + "' is not of the form name:params");
  }
  const auto name = law_text.substr(0, colon);
  const auto args = parse_numbers(law_text.substr(colon + 1), law_text);
  auto expect = [&](std::size_t count) {
    if (args.size() != count) {
      throw Error(ErrorCode::ParseError, "law '" + std::string(name) + "' takes " + std::to_string(count) +
                                             " parameter(s), got " + std::to_string(args.size()));
    }
  };
  if (name == "exponential") {
    expect(1);
    return SourceLaw(Exponential{args[0]});
  }
  if (name == "gamma") {
    expect(2);
    return SourceLaw(Gamma{args[0], args[1]});
  }
  if (name == "uniform") {
    expect(2);
    return SourceLaw(Uniform{args[0], args[1]});
  }
  if (name == "periodic") {
    expect(1);
    return SourceLaw(Periodic{args[0]});
  }
  if (name == "antibunch") {
    expect(2);
    return SourceLaw(AntibunchShaped{args[0], args[1]});
  }
  throw Error(ErrorCode::ParseError, "unknown law '" + std::string(name) +
                                         "' (expected exponential, gamma, uniform, periodic, antibunch)");
}

std::string_view SourceLaw::name() const noexcept {
  return std::visit(overloaded{
                        [](const Exponential&) { return std::string_view("exponential"); },
                        [](const Gamma&) { return std::string_view("gamma"); },
                        [](const Uniform&) { return std::string_view("uniform"); },
                        [](const Periodic&) { return std::string_view("periodic"); },
                        [](const AntibunchShaped&) { return std::string_view("antibunch"); },
                    },
                    kind_);
}

std::vector<double> SourceLaw::parameters() const {
  return std::visit(overloaded{
                        [](const Exponential& e) { return std::vector<double>{e.rate}; },
                        [](const Gamma& g) { return std::vector<double>{g.shape, g.rate}; },
                        [](const Uniform& u) { return std::vector<double>{u.lo, u.hi}; },
                        [](const Periodic& p) { return std::vector<double>{p.period}; },
                        [](const AntibunchShaped& a) { return std::vector<double>{a.gamma, a.mu}; },
                    },
                    kind_);
}

std::string SourceLaw::to_string() const {
  std::string s(name());
  s += ':';
  const auto params = parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) s += ',';
    s += format_number(params[i]);
  }
  return s;
}

double SourceLaw::mean() const noexcept {
  return std::visit(overloaded{
                        [](const Exponential& e) { return 1.0 / e.rate; },
                        [](const Gamma& g) { return g.shape / g.rate; },
                        [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
                        [](const Periodic& p) { return p.period; },
                        [](const AntibunchShaped& a) { return 1.0 / a.mu + 1.0 / (a.gamma + a.mu); },
                    },
                    kind_);
}

double SourceLaw::survival(double t) const {
  if (t <= 0.0) return 1.0;
  return std::visit(overloaded{
                        [t](const Exponential& e) { return std::exp(-e.rate * t); },
                        [t](const Gamma& g) { return boost::math::gamma_q(g.shape, g.rate * t); },
                        [t](const Uniform& u) { return std::clamp((u.hi - t) / (u.hi - u.lo), 0.0, 1.0); },
                        [t](const Periodic& p) { return t <= p.period ? 1.0 : 0.0; },
                        [t](const AntibunchShaped& a) {
                          const double c = antibunch_norm(a);
                          return c * (std::exp(-a.mu * t) / a.mu -
                                      std::exp(-(a.gamma + a.mu) * t) / (a.gamma + a.mu));
                        },
                    },
                    kind_);
}

Density discretize(const SourceLaw& law, const TimeGrid& grid) {
  const double dt = grid.dt();
  std::vector<double> v(grid.size());
  double upper = law.survival(0.0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double lower = law.survival(grid.time(k) + 0.5 * dt);
    v[k] = (upper - lower) / dt;
    upper = lower;
  }
  if (law.is_lattice() && law.survival(grid.horizon() - 0.5 * dt) > 0.0) {
    throw Error(ErrorCode::InvalidArgument, "period " + format_number(law.mean()) +
                                                " lies beyond the grid horizon " +
                                                format_number(grid.horizon()));
  }
  return Density(grid, std::move(v));
}

TimeGrid default_grid(const SourceLaw& law, Efficiency p, std::size_t n, double coverage) {
  const double span = coverage * law.mean() / p.value();
  if (law.is_lattice()) {
    // Integer number of samples per period keeps lattice points on grid points.
    const double period = law.mean();
    const double per_period = std::floor(static_cast<double>(n) * period / span);
    if (per_period < 1.0) {
      throw Error(ErrorCode::InvalidArgument, "grid of " + std::to_string(n) +
                                                  " samples cannot hold the periodic source at this efficiency");
    }
    return TimeGrid(n, period / per_period);
  }
  return TimeGrid(n, span / static_cast<double>(n));
}

double Rng::uniform() noexcept {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

double Rng::normal() noexcept {
  // Marsaglia polar method; the second variate is discarded to keep the
  // draw sequence independent of call history.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double Rng::gamma(double shape, double rate) noexcept {
  // Marsaglia & Tsang (2000).
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0, 1.0);
    return g * std::pow(uniform(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v / rate;
  }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

IntervalSampler::IntervalSampler(const SourceLaw& law) : law_(law) {
  if (const auto* a = std::get_if<AntibunchShaped>(&law_.kind())) {
    // Table reaches far enough that the remaining survival is below 2^-53.
    const double t_max = 45.0 / a->mu;
    table_t_.resize(table_size);
    table_cdf_.resize(table_size);
    for (std::size_t j = 0; j < table_size; ++j) {
      const double t = t_max * static_cast<double>(j) / static_cast<double>(table_size - 1);
      table_t_[j] = t;
      table_cdf_[j] = 1.0 - law_.survival(t);
    }
    table_cdf_.front() = 0.0;
    table_cdf_.back() = 1.0;
  }
}

double IntervalSampler::operator()(Rng& rng) const {
  return std::visit(overloaded{
                        [&](const Exponential& e) { return rng.exponential(e.rate); },
                        [&](const Gamma& g) { return rng.gamma(g.shape, g.rate); },
                        [&](const Uniform& u) { return u.lo + (u.hi - u.lo) * rng.uniform(); },
                        [&](const Periodic& p) { return p.period; },
                        [&](const AntibunchShaped&) {
                          const double u = rng.uniform();
                          const auto it = std::upper_bound(table_cdf_.begin(), table_cdf_.end(), u);
                          const auto j = static_cast<std::size_t>(it - table_cdf_.begin());
                          const double c0 = table_cdf_[j - 1];
                          const double c1 = table_cdf_[j];
                          const double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
                          return table_t_[j - 1] + w * (table_t_[j] - table_t_[j - 1]);
                        },
                    },
                    law_.kind());
}

} // namespace backaction::mcsim
