#include <backaction/backaction.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace backaction {

Efficiency::Efficiency(double p) : p_(p) {
  if (!(p > 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "detection efficiency must lie in (0, 1], got " << p;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

bool ClassicalRegion::contains(complex z, double eps) const noexcept {
  return std::abs(z - center) <= radius + eps;
}

double ClassicalRegion::excess(complex z) const noexcept { return std::abs(z - center) - radius; }

ClassicalRegion classical_region(Efficiency p) {
  // The map has real coefficients, so the image of the unit circle is the
  // circle through w(1) = 1 and w(-1) = -p / (2 - p).
  const double q = p.value();
  return ClassicalRegion{p, (1.0 - q) / (2.0 - q), 1.0 / (2.0 - q)};
}

std::vector<complex> region_boundary_samples(Efficiency p, std::size_t count) {
  if (count < 3) {
    throw Error(ErrorCode::InvalidArgument, "region boundary needs at least 3 samples");
  }
  std::vector<complex> w(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(count);
    const complex z = std::polar(1.0, theta);
    w[j] = p.value() * z / (1.0 - p.miss() * z);
  }
  return w;
}

bool in_classical_region(complex z, Efficiency p, double eps_mag) {
  return classical_region(p).contains(z, eps_mag);
}

Spectrum detected_spectrum(const Spectrum& phi, Efficiency p, const Tolerances& tol) {
  check_unit_bound(phi, tol);
  constexpr double underflow = 1e-14;
  std::vector<complex> out(phi.values.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    const complex den = 1.0 - p.miss() * phi.values[m];
    if (std::abs(den) < underflow) {
      std::ostringstream os;
      os << "|1 - (1-p) phi| = " << std::abs(den) << " at frequency index " << m;
      throw Error(ErrorCode::DenominatorUnderflow, os.str());
    }
    out[m] = p.value() * phi.values[m] / den;
  }
  return Spectrum(phi.grid, std::move(out));
}

Density detected_density(const Density& f, Efficiency p, const Tolerances& tol) {
  const Spectrum Phi = detected_spectrum(forward_transform(f, tol), p, tol);
  Density F = inverse_transform(Phi, tol);

  // Circular convolution powers of a nonnegative sequence are nonnegative;
  // anything below the round-off floor is a numerical failure.
  const double floor = 1e-9 * F.peak();
  for (std::size_t k = 0; k < F.values.size(); ++k) {
    double& v = F.values[k];
    if (v < 0.0) {
      if (-v > floor) {
        std::ostringstream os;
        os << "nonnegativity of detected density violated at sample " << k << ": " << v;
        throw Error(ErrorCode::InvalidDensity, os.str());
      }
      v = 0.0;
    }
  }

  const double tail = F.tail_mass(tol.tail_fraction);
  if (tail >= tol.tail) {
    std::ostringstream os;
    os << "detected density carries mass " << tail << " in the last " << tol.tail_fraction * 100
       << "% of the grid (limit " << tol.tail << "); thinning stretches the mean waiting time from "
       << f.mean() << " to about " << f.mean() / p.value() << " but the horizon is only "
       << F.grid.horizon();
    throw Error(ErrorCode::HorizonTooShort, os.str());
  }
  return F;
}

namespace {

// out[i] = dt * sum_{l <= i} a[l] b[i - l], truncated to the grid.
std::vector<double> linear_convolution(const std::vector<double>& a, const std::vector<double>& b,
                                       double dt) {
  const std::size_t n = a.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    const double al = a[l] * dt;
    if (al == 0.0) continue;
    const double* bp = b.data();
    double* op = out.data() + l;
    const std::size_t len = n - l;
    for (std::size_t i = 0; i < len; ++i) op[i] += al * bp[i];
  }
  return out;
}

// Calls visit(K, F_K) for K = 0 .. order.
template <typename Visit>
void accumulate_series(const Density& f, Efficiency p, std::size_t order, const Tolerances& tol,
                       Visit&& visit) {
  validate_density(f, tol);
  const double dt = f.grid.dt();
  std::vector<double> power = f.values;
  std::vector<double> acc(power.size());
  double weight = p.value();
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = weight * power[i];
  visit(std::size_t{0}, acc);
  for (std::size_t k = 1; k <= order; ++k) {
    power = linear_convolution(power, f.values, dt);
    weight *= p.miss();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * power[i];
    visit(k, acc);
  }
}

} // namespace

std::vector<Density> series_partial_sums(const Density& f, Efficiency p, std::size_t order,
                                         const Tolerances& tol) {
  std::vector<Density> sums;
  sums.reserve(order + 1);
  accumulate_series(f, p, order, tol,
                    [&](std::size_t, const std::vector<double>& acc) { sums.emplace_back(f.grid, acc); });
  return sums;
}

Density series_partial_sum(const Density& f, Efficiency p, std::size_t order, const Tolerances& tol) {
  std::vector<double> last;
  accumulate_series(f, p, order, tol, [&](std::size_t k, const std::vector<double>& acc) {
    if (k == order) last = acc;
  });
  return Density(f.grid, std::move(last));
}

EmittedSpectrum emitted_spectrum(const Spectrum& Phi, Efficiency p, const Tolerances& tol) {
  check_unit_bound(Phi, tol);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double c = 1.0 - 1.0 / p.value();
  const double inv_p = 1.0 / p.value();

  std::vector<complex> out(Phi.values.size());
  double proximity = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < out.size(); ++m) {
    const complex cz = c * Phi.values[m];
    const complex den = 1.0 - cz;
    const double a = std::abs(den);
    if (a <= 8.0 * eps * std::max(1.0, std::abs(cz))) {
      std::ostringstream os;
      os << "denominator 1 - (1 - 1/p) Phi vanishes at frequency index " << m
         << " (omega = " << Phi.grid.omega(m) << ")";
      throw Error(ErrorCode::ExactPole, os.str());
    }
    proximity = std::min(proximity, a);
    out[m] = inv_p * Phi.values[m] / den;
  }
  return EmittedSpectrum{Spectrum(Phi.grid, std::move(out)), proximity};
}

std::string_view to_string(VerdictKind kind) noexcept {
  switch (kind) {
  case VerdictKind::Classical: return "classical";
  case VerdictKind::Nonclassical: return "nonclassical";
  case VerdictKind::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

ClassicalityVerdict classify(const Density& F, Efficiency p, const ClassifyOptions& options) {
  const Tolerances& tol = options.tolerances;
  const Spectrum Phi = forward_transform(F, tol);
  const ClassicalRegion region = classical_region(p);

  std::vector<RegionViolation> violations;
  for (std::size_t m = 0; m < Phi.values.size(); ++m) {
    const complex z = Phi.values[m];
    if (!region.contains(z, tol.mag)) {
      violations.push_back({m, Phi.grid.omega(m), z, region.excess(z)});
    }
  }

  std::optional<EmittedSpectrum> emitted;
  try {
    emitted.emplace(emitted_spectrum(Phi, p, tol));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ExactPole) throw;
  }
  if (!emitted) {
    return ClassicalityVerdict{VerdictKind::Indeterminate, p, F.grid, std::nullopt, 0.0, 0.0,
                               std::move(violations), options.tau_neg, options.tau_pole};
  }

  Density recovered = inverse_transform(emitted->phi, tol);
  const double negativity = recovered.negativity_mass();

  VerdictKind kind = VerdictKind::Classical;
  if (emitted->pole_proximity < options.tau_pole) {
    kind = VerdictKind::Indeterminate;
  } else if (negativity > options.tau_neg || !violations.empty()) {
    kind = VerdictKind::Nonclassical;
  }
  return ClassicalityVerdict{kind,
                             p,
                             F.grid,
                             std::move(recovered),
                             negativity,
                             emitted->pole_proximity,
                             std::move(violations),
                             options.tau_neg,
                             options.tau_pole};
}

} // namespace backaction
