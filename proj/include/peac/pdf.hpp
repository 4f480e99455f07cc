#pragma once

#include <cstddef>

namespace peac {

/// Amplitude 1.7777 below which the fringe-value density has a single maximum.
inline constexpr double kPeakMergeRatio = 1.7777;

struct PdfParams {
  double amplitude = 0.0;
  double mean = 0.0;
  double sigma = 1.0;

  /// Diagnostic only: the density is double-peaked when A / sigma exceeds the merge ratio.
  bool double_peak() const noexcept { return sigma > 0.0 && amplitude / sigma > kPeakMergeRatio; }
};

/// Density of S = B + A cos(phi) with phi uniform and B ~ Normal(mean, sigma^2),
/// i.e. the arcsine density convolved with a Gaussian. Evaluated as
/// (1 / (pi sigma sqrt(2 pi))) * integral over u in [-pi/2, pi/2] of
/// exp(-(s - A sin u - mean)^2 / (2 sigma^2)) with a 64-point Gauss-Legendre
/// rule restricted to the window where the Gaussian is non-negligible.
/// Throws Errc::singular_parameter for sigma <= 0.
double pdf_eval(double s, const PdfParams& p);

/// Number of local maxima of the density on a uniform grid of `grid_points`
/// over [mean - A - 6 sigma, mean + A + 6 sigma].
std::size_t count_modes(const PdfParams& p, std::size_t grid_points = 4001);

/// Ratio A / sigma at which the density changes from two maxima to one,
/// located by bisection on count_modes to within `tolerance`.
double peak_merge_threshold(double tolerance = 1e-4);

}  // namespace peac
