#pragma once
// Detector back-action on a renewal source.
//
// A source emits particles with i.i.d. waiting times of density f(t); a
// detector registers each one independently with probability p. The density
// F(t) of intervals between consecutive detections is the geometric mixture
//
//   F = sum_{k>=0} p (1-p)^k f^{*(k+1)},
//
// whose spectrum is the Moebius image Phi = p phi / (1 - (1-p) phi).
// Inverting that map recovers phi (and f) from a measured F; an F whose
// spectrum leaves the image of the unit disk, or whose recovered f is
// signed, has no underlying classical source density.

#include <backaction/spectral.hpp>

#include <optional>
#include <vector>

namespace backaction {

/// Detection probability p in (0, 1].
class Efficiency {
public:
  /// Throws InvalidArgument outside (0, 1].
  explicit Efficiency(double p);

  double value() const noexcept { return p_; }
  /// Probability 1 - p of overlooking a particle.
  double miss() const noexcept { return 1.0 - p_; }

  friend bool operator==(const Efficiency&, const Efficiency&) = default;

private:
  double p_;
};

/// Disk holding every spectral sample of a classical detected density.
struct ClassicalRegion {
  Efficiency p;
  double center;
  double radius;

  bool contains(complex z, double eps) const noexcept;
  /// Signed distance of z outside the boundary (negative inside).
  double excess(complex z) const noexcept;
};

ClassicalRegion classical_region(Efficiency p);

/// Moebius image of the unit circle, z_j = exp(2 pi i j / count).
/// Throws InvalidArgument for count < 3.
std::vector<complex> region_boundary_samples(Efficiency p, std::size_t count);

bool in_classical_region(complex z, Efficiency p, double eps_mag = Tolerances{}.mag);

/// Phi = p phi / (1 - (1-p) phi), pointwise.
Spectrum detected_spectrum(const Spectrum& phi, Efficiency p, const Tolerances& tol = {});

/// F = inverse_transform(detected_spectrum(forward_transform(f), p)).
/// Throws HorizonTooShort if F does not fit the grid.
Density detected_density(const Density& f, Efficiency p, const Tolerances& tol = {});

/// Truncated series sum_{k=0..order} p (1-p)^k f^{*(k+1)} built from direct
/// (linear, non-circular) time-domain convolutions.
Density series_partial_sum(const Density& f, Efficiency p, std::size_t order,
                           const Tolerances& tol = {});

/// Every partial sum F_0 .. F_order; element K equals series_partial_sum(f, p, K).
std::vector<Density> series_partial_sums(const Density& f, Efficiency p, std::size_t order,
                                         const Tolerances& tol = {});

struct EmittedSpectrum {
  Spectrum phi;
  /// min_m |1 - (1 - 1/p) Phi_m|
  double pole_proximity;
};

/// phi = (1/p) Phi / (1 - (1 - 1/p) Phi), pointwise. Throws ExactPole when a
/// denominator cancels to machine precision.
EmittedSpectrum emitted_spectrum(const Spectrum& Phi, Efficiency p, const Tolerances& tol = {});

enum class VerdictKind { Classical, Nonclassical, Indeterminate };

std::string_view to_string(VerdictKind kind) noexcept;

struct RegionViolation {
  std::size_t index;
  double omega;
  complex value;
  double excess;
};

struct ClassifyOptions {
  double tau_neg = 1e-3;
  double tau_pole = 1e-6;
  Tolerances tolerances{};
};

struct ClassicalityVerdict {
  VerdictKind kind;
  Efficiency p;
  TimeGrid grid;
  /// Unclipped; absent only when the inversion hit an exact pole.
  std::optional<Density> recovered_f;
  double negativity_mass;
  double pole_proximity;
  std::vector<RegionViolation> region_violations;
  double tau_neg;
  double tau_pole;

  /// Outcome of each test on its own; the two may disagree.
  bool region_test_classical() const noexcept { return region_violations.empty(); }
  bool inversion_test_classical() const noexcept {
    return recovered_f.has_value() && negativity_mass <= tau_neg;
  }
};

ClassicalityVerdict classify(const Density& F, Efficiency p, const ClassifyOptions& options = {});

} // namespace backaction
