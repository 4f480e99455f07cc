#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "peac/histogram.hpp"
#include "peac/least_squares.hpp"
#include "peac/pdf.hpp"
#include "peac/signal_model.hpp"

namespace peac {

class Dataset;

/// Fraction of the peak height used to locate the outward drop.
inline constexpr double kGuessDropFraction = 0.25;
/// The sharper horn loses the initial guess when its density mismatch exceeds the
/// other horn's by this factor.
inline constexpr double kGuessMismatchVeto = 4.0;
/// Ratios a / (sqrt(2) a0) up to 1 + this clamp silently before arccos.
inline constexpr double kArccosClampTolerance = 1e-6;
inline constexpr double kUnwrapDecreasePenalty = 100.0;

struct InitialGuess {
  PdfParams params;
  /// True when no outward drop exists and the search ran inward.
  bool low_confidence = false;
};

/// Multiplier sqrt(-1 / (2 ln k)) turning the peak-to-drop distance into sigma.
double drop_to_sigma_factor(double k = kGuessDropFraction);

InitialGuess initial_guesses(const Histogram& h, double data_mean);
/// Convenience overload; the mean is taken from the histogram bin centres.
InitialGuess initial_guesses(const Histogram& h);

struct AmplitudeBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

struct PdfFit {
  PdfParams params;
  bool converged = false;
  double residual = 0.0;  // sum of squared density residuals
  int iterations = 0;
  bool low_confidence_guess = false;
  double bin_width = 0.0;
  bool double_peak() const noexcept { return params.double_peak(); }
};

struct PdfFitOptions {
  AmplitudeBounds bounds{};
  LsqOptions lsq{.max_iterations = 200, .ftol = 1e-8, .xtol = 1e-8};
};

/// Unweighted least squares of the density model against counts / (total * width)
/// at the bin centres. Throws FitFailure (carrying the best parameters) when
/// the optimizer does not converge.
PdfFit fit_pdf(const Histogram& h, const PdfParams& guess, const PdfFitOptions& options = {});

/// Bins `values` with the square-root rule, guesses and fits.
PdfFit fit_values(std::span<const double> values, const PdfFitOptions& options = {});

struct ChannelSuiteFit {
  PdfFit plus;
  PdfFit minus;
  PdfFit sum;
  PdfFit diff;
  double a0 = 0.0;  // mean of the plus/minus amplitudes
};

/// Fits S_plus and S_minus freely, then S_sum and S_diff with amplitude bounded to
/// [0, sqrt(2) a0] and sigma seeded from the plus/minus fits.
ChannelSuiteFit fit_channel_suite(std::span<const double> plus, std::span<const double> minus);
ChannelSuiteFit fit_channel_suite(const Dataset& data, double T_s);

/// 2 arccos(a_sum / (sqrt(2) a0)) in [0, pi].
double reconstruct_theta_two_state(double a_sum, double a0);
/// 2 arcsin(a_diff / (sqrt(2) a0)) in [0, pi].
double reconstruct_theta_from_diff(double a_diff, double a0);

/// Wrapped phase in [0, pi] from whichever of S_sum / S_diff has the smaller
/// fitted amplitude, i.e. the projection onto the collapsing axis.
double reconstruct_theta_favorable(const ChannelSuiteFit& fit);

struct ThreeStateBranches {
  /// Both solutions of the quadratic in cos(theta/2) mapped to theta in [0, 2pi];
  /// nullopt where |cos(theta/2)| exceeds 1 beyond the clamp tolerance.
  std::array<std::optional<double>, 2> theta;
  std::array<double, 2> cos_half{};
};

/// Pointwise inversion of the three-state amplitude law for known weights.
ThreeStateBranches reconstruct_theta_three_state(double a_all, const MixtureModel& weights);

/// Unwraps a series whose magnitude grows with T. Chooses the branches
/// 2 pi m +- theta_wrapped that minimize the summed squared jumps between
/// neighbours, with decreasing jumps weighted by kUnwrapDecreasePenalty. The
/// first point stays on its [0, pi] branch.
std::vector<double> unwrap(std::span<const double> wrapped);

}  // namespace peac
