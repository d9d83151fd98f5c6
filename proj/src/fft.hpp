#pragma once

#include <complex>
#include <span>
#include <vector>

namespace backaction::detail {

/// Unscaled forward DFT of a real signal, sum_k x_k exp(-2 pi i m k / n).
/// The returned spectrum is exactly Hermitian.
std::vector<std::complex<double>> real_dft(std::span<const double> x);

/// Unscaled inverse DFT, sum_m X_m exp(+2 pi i m k / n).
std::vector<std::complex<double>> complex_idft(std::span<const std::complex<double>> x);

} // namespace backaction::detail
