#include <backaction/spectral.hpp>

#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace backaction {

TimeGrid::TimeGrid(std::size_t n, double dt) : n_(n), dt_(dt) {
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "time grid needs n >= 2 samples, got " + std::to_string(n));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    std::ostringstream os;
    os << "time grid needs a finite positive dt, got " << dt;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

double TimeGrid::omega(std::size_t m) const noexcept {
  const auto n = static_cast<double>(n_);
  const double signed_m = (2 * m < n_) ? static_cast<double>(m) : static_cast<double>(m) - n;
  return 2.0 * std::numbers::pi * signed_m / (n * dt_);
}

std::size_t TimeGrid::tail_start(double tail_fraction) const noexcept {
  const auto width = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n_)));
  return n_ - std::clamp<std::size_t>(width, 1, n_);
}

Density::Density(TimeGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "density has " + std::to_string(values.size()) +
                                             " samples for a grid of " + std::to_string(grid.size()));
  }
}

double Density::mass() const noexcept {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.dt();
}

double Density::mean() const noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += grid.time(k) * values[k];
  return s * grid.dt() / mass();
}

double Density::tail_mass(double tail_fraction) const noexcept {
  double s = 0.0;
  for (std::size_t k = grid.tail_start(tail_fraction); k < values.size(); ++k) s += std::abs(values[k]);
  return s * grid.dt();
}

double Density::negativity_mass() const noexcept {
  double s = 0.0;
  for (double v : values) s += std::max(0.0, -v);
  return s * grid.dt();
}

double Density::peak() const noexcept {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

Spectrum::Spectrum(TimeGrid g, std::vector<complex> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "spectrum has " + std::to_string(values.size()) +
                                             " samples for a grid of " + std::to_string(grid.size()));
  }
}

double Spectrum::max_modulus() const noexcept {
  double m = 0.0;
  for (const auto& z : values) m = std::max(m, std::abs(z));
  return m;
}

double Spectrum::hermitian_defect() const noexcept {
  const std::size_t n = values.size();
  double d = std::abs(values[0].imag());
  for (std::size_t m = 1; m < n; ++m) {
    d = std::max(d, std::abs(values[n - m] - std::conj(values[m])));
  }
  return d;
}

void validate_density(const Density& d, const Tolerances& tol) {
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    const double v = d.values[k];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidDensity, "finiteness violated at sample " + std::to_string(k));
    }
    if (v < -tol.neg) {
      std::ostringstream os;
      os << "nonnegativity violated at sample " << k << " (t = " << d.grid.time(k) << "): value " << v
         << " < -" << tol.neg;
      throw Error(ErrorCode::InvalidDensity, os.str());
    }
  }
  const double mass = d.mass();
  if (std::abs(mass - 1.0) > tol.norm) {
    std::ostringstream os;
    os << "normalization violated: dt * sum = " << mass << ", tolerance " << tol.norm;
    throw Error(ErrorCode::InvalidDensity, os.str());
  }
  const double tail = d.tail_mass(tol.tail_fraction);
  if (tail >= tol.tail) {
    std::ostringstream os;
    os << "tail headroom violated: last " << tol.tail_fraction * 100 << "% of the grid (t >= "
       << d.grid.time(d.grid.tail_start(tol.tail_fraction)) << ") carries mass " << tail
       << " >= " << tol.tail << "; extend the horizon n*dt = " << d.grid.horizon();
    throw Error(ErrorCode::InvalidDensity, os.str());
  }
}

void check_unit_bound(const Spectrum& s, const Tolerances& tol) {
  for (std::size_t m = 0; m < s.values.size(); ++m) {
    const double a = std::abs(s.values[m]);
    if (!(a <= 1.0 + tol.mag)) {
      std::ostringstream os;
      os << "unit-modulus bound violated at frequency index " << m << " (omega = " << s.grid.omega(m)
         << "): |value| = " << a;
      throw Error(ErrorCode::InvalidSpectrum, os.str());
    }
  }
}

Spectrum forward_transform(const Density& d, const Tolerances& tol) {
  validate_density(d, tol);
  return forward_transform_unchecked(d);
}

Spectrum forward_transform_unchecked(const Density& d) {
  auto values = detail::real_dft(d.values);
  const double dt = d.grid.dt();
  for (auto& z : values) z *= dt;
  return Spectrum(d.grid, std::move(values));
}

Density inverse_transform(const Spectrum& s, const Tolerances& tol) {
  const auto signal = detail::complex_idft(s.values);
  const double scale = 1.0 / (static_cast<double>(s.grid.size()) * s.grid.dt());

  std::vector<double> re(signal.size());
  double peak = 0.0;
  double residual = 0.0;
  std::size_t worst = 0;
  for (std::size_t k = 0; k < signal.size(); ++k) {
    re[k] = signal[k].real() * scale;
    peak = std::max(peak, std::abs(re[k]));
    const double im = std::abs(signal[k].imag() * scale);
    if (im > residual) {
      residual = im;
      worst = k;
    }
  }
  if (residual > tol.mag * std::max(1.0, peak)) {
    std::ostringstream os;
    os << "imaginary residual " << residual << " at sample " << worst << " exceeds " << tol.mag
       << " * max(1, peak " << peak << ")";
    throw Error(ErrorCode::NonHermitianSpectrum, os.str());
  }
  return Density(s.grid, std::move(re));
}

} // namespace backaction
