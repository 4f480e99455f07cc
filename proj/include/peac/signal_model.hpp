#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "peac/rng.hpp"

namespace peac {

/// One homoscedastic fringe channel: S = B + A cos(phi), B ~ Normal(mean, sigma^2).
struct SignalParams {
  double amplitude = 0.0;
  double baseline_mean = 0.0;
  double baseline_sigma = 0.0;

  /// |mean| + amplitude <= 1 holds for a normalized population difference.
  /// Rotated signals may exceed it, so callers only warn on violation.
  bool is_physical() const noexcept;
  void validate() const;
};

/// Incoherent mixture of the three magnetic substates with a common amplitude.
/// The two-state sum signal is lambda_0 = 0, lambda_plus = lambda_minus = 1/sqrt(2).
struct MixtureModel {
  double lambda_0 = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double a0 = 1.0;
  double theta = 0.0;

  double delta_lambda() const noexcept { return lambda_plus - lambda_minus; }
  double lambda_total() const noexcept { return lambda_0 + lambda_plus + lambda_minus; }
  /// Weight vector normalized so that lambda_total() == 1 is NOT enforced.
  bool is_normalized(double tol = 1e-9) const noexcept;
  void validate() const;

  static MixtureModel two_state(double a0, double theta) noexcept;
  /// Three-state weights from (lambda_0, delta_lambda) with the total fixed to `total`.
  static MixtureModel from_imbalance(double lambda_0, double delta_lambda, double a0,
                                     double theta, double total = 1.0) noexcept;
};

struct ScanConfig {
  std::vector<double> phases;  // laser phases in [0, 2pi)
  int repetitions = 1;
  bool phase_stable = false;
  std::uint64_t seed = 0;

  std::size_t shots() const noexcept { return phases.size() * static_cast<std::size_t>(repetitions); }
  void validate() const;

  static ScanConfig evenly_spaced(int phase_count, int repetitions, bool phase_stable,
                                  std::uint64_t seed);
};

/// Draws the common fringe phase for shot `index` of a scan.
double scan_phase(const ScanConfig& scan, std::size_t index, Engine& rng);

std::vector<double> generate_samples(const SignalParams& params, double theta_off,
                                     const ScanConfig& scan, std::size_t n, Engine& rng);
/// Seeds the engine from scan.seed.
std::vector<double> generate_samples(const SignalParams& params, double theta_off,
                                     const ScanConfig& scan, std::size_t n);

struct Superposition {
  double amplitude = 0.0;
  double offset_phase = 0.0;  // (-pi, pi]; 0 by convention when amplitude vanishes
};

/// Harmonic addition: sum_i w_i cos(phi + theta_i) = A cos(phi + theta_off).
Superposition superpose_cosines(std::span<const double> weights, std::span<const double> phases);

/// Amplitude of lambda_0 S_0 + lambda_plus S_plus + lambda_minus S_minus with
/// S_{+-} phase shifted by +-theta/2.
double amplitude_three_state(const MixtureModel& model);
double offset_phase_three_state(const MixtureModel& model);

/// S(alpha) = s_minus cos(alpha) + s_plus sin(alpha). pi/4 gives S_sum, 3pi/4 S_diff.
double rotate_bivariate(double s_minus, double s_plus, double alpha) noexcept;

inline double sum_signal(double s_plus, double s_minus) noexcept {
  return (s_plus + s_minus) / std::numbers::sqrt2;
}
inline double diff_signal(double s_plus, double s_minus) noexcept {
  return (s_plus - s_minus) / std::numbers::sqrt2;
}

/// Normalized population difference (n0 - n1) / (n0 + n1).
double normalize_ports(double n0, double n1);

}  // namespace peac
