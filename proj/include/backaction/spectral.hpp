#pragma once
// Uniform time grid, sampled waiting-time densities and their continuous
// Fourier transforms.
//
// Conventions:
//   t_k     = k * dt,                 k in [0, n)
//   omega_m = 2 pi m / (n dt),        folded to negative values for m >= n/2
//   phi_m   = dt * sum_k f_k exp(-i omega_m t_k)      (rectangle rule)
//   f_k     = 1/(n dt) * sum_m phi_m exp(+i omega_m t_k)
//
// The pair is exact on the grid, so a pointwise product of spectra is the
// circular rectangle-rule convolution of the densities.

#include <backaction/error.hpp>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace backaction {

using complex = std::complex<double>;

/// Numerical tolerances shared by every pipeline stage.
struct Tolerances {
  double norm = 1e-6;         ///< |dt * sum f - 1|
  double mag = 1e-9;          ///< spectral modulus bound, Hermitian residuals
  double neg = 0.0;           ///< allowed negativity of declared-valid densities
  double tail = 1e-8;         ///< mass allowed in the trailing tail_fraction of the grid
  double tail_fraction = 0.1;
};

class TimeGrid {
public:
  /// Throws InvalidArgument unless n >= 2 and dt is finite and positive.
  TimeGrid(std::size_t n, double dt);

  std::size_t size() const noexcept { return n_; }
  double dt() const noexcept { return dt_; }
  double horizon() const noexcept { return static_cast<double>(n_) * dt_; }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt_; }
  /// Signed angular frequency of sample m.
  double omega(std::size_t m) const noexcept;
  /// Index of the first sample belonging to the tail window.
  std::size_t tail_start(double tail_fraction) const noexcept;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
  std::size_t n_;
  double dt_;
};

/// Sampled density on a TimeGrid. Values may be signed (recovered densities
/// keep their negative parts); validity is checked at operation boundaries.
struct Density {
  TimeGrid grid;
  std::vector<double> values;

  Density(TimeGrid g, std::vector<double> v);

  double mass() const noexcept;
  double mean() const noexcept;
  double tail_mass(double tail_fraction) const noexcept;
  double negativity_mass() const noexcept;
  double peak() const noexcept;
};

struct Spectrum {
  TimeGrid grid;
  std::vector<complex> values;

  Spectrum(TimeGrid g, std::vector<complex> v);

  double max_modulus() const noexcept;
  /// max_m |values[n-m] - conj(values[m])|
  double hermitian_defect() const noexcept;
};

/// Throws InvalidDensity naming the first violated invariant
/// (nonnegativity, normalization, tail headroom).
void validate_density(const Density& d, const Tolerances& tol = {});

/// Throws InvalidSpectrum when |values[m]| > 1 + tol.mag anywhere.
void check_unit_bound(const Spectrum& s, const Tolerances& tol = {});

Spectrum forward_transform(const Density& d, const Tolerances& tol = {});

/// Unchecked transform for signed or sub-normalized signals (series terms,
/// recovered densities). Same scaling as forward_transform.
Spectrum forward_transform_unchecked(const Density& d);

/// Throws NonHermitianSpectrum when the imaginary residual of the
/// reconstructed signal exceeds tol.mag (relative to max(1, peak)).
Density inverse_transform(const Spectrum& s, const Tolerances& tol = {});

} // namespace backaction
