#pragma once

#include <numbers>
#include <span>

namespace peac {

/// Effective two-photon wave number for first-order Bragg at 780.226 nm, rad/m.
inline constexpr double kDefaultKeff = 2.0 * 2.0 * std::numbers::pi / 780.226e-9;
inline constexpr double kDefaultTau = 100e-6;
inline constexpr double kDefaultGamma = 0.1486;
/// Pulse area of one Blackman window is 0.42 tau.
inline constexpr double kBlackmanArea = 0.42;

struct PulseConfig {
  double k_eff = kDefaultKeff;  // rad/m
  double a_ext = 0.0;           // m/s^2
  double tau = kDefaultTau;     // s, pulse length
  double T = 0.0;               // s, pulse separation
  double gamma = kDefaultGamma;

  /// Peak Rabi frequency such that the pi/2 pulses have area pi/2.
  double rabi_peak() const noexcept { return 0.5 * std::numbers::pi / (kBlackmanArea * tau); }
  /// T > tau > 0 and k_eff > 0; overlapping pulses are outside the model.
  void validate() const;
};

/// Blackman window on [0, tau], zero outside.
double blackman(double t, double tau) noexcept;

struct QuadratureOptions {
  /// Upper bound on the step inside a pulse, as a fraction of tau.
  double max_step_fraction = 1.0 / 200.0;
  /// Accepted relative change when the step is halved.
  double convergence_tolerance = 1e-6;
};

/// Differential phase of the pulse train from the sensitivity integral of the
/// Doppler detuning k_eff a_ext t. Positive for a_ext > 0.
double finite_pulse_phase(const PulseConfig& cfg, const QuadratureOptions& options = {});

/// Least-squares fit of theta(T) = 2 k a T^2 (1 + gamma tau / T) to
/// finite_pulse_phase over T_grid. Only k_eff and a_ext are taken from `base`.
double fit_gamma(double tau, std::span<const double> T_grid, const PulseConfig& base = {});

/// Closed form 2 k a T^2 (1 + gamma tau / T).
double theta_of_T(const PulseConfig& cfg);
/// Inverse of theta_of_T in T (positive root of the quadratic).
double T_of_theta(const PulseConfig& cfg, double theta);

/// Least-squares a_ext for theta_i = a * g(T_i); k_eff, tau, gamma from cfg.
double fit_acceleration(std::span<const double> T, std::span<const double> theta,
                        const PulseConfig& cfg);

}  // namespace peac
