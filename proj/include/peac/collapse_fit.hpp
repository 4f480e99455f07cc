#pragma once

#include <span>
#include <vector>

#include "peac/pulse_physics.hpp"

namespace peac {

struct CollapsePoint {
  double T_s = 0.0;
  double amplitude = 0.0;
};

struct CollapseFitResult {
  double a_ext = 0.0;  // m/s^2
  double lambda0 = 0.0;
  double delta_lambda = 0.0;
  double a0 = 0.0;
  // One-sigma errors from the residual variance and (J^T J)^-1; NaN when unavailable.
  double a_ext_se = 0.0;
  double lambda0_se = 0.0;
  double delta_lambda_se = 0.0;
  double a0_se = 0.0;
  bool converged = false;
  double residual = 0.0;  // sum of squared amplitude residuals
};

struct CollapseFitOptions {
  /// a_ext search window as multiples of the template value.
  double scan_low = 0.5;
  double scan_high = 2.0;
  int scan_points = 400;
  /// Used when the template carries a_ext = 0.
  double default_a_ext = 0.0322;
};

/// Non-state-selective amplitude A0 sqrt(dl^2 sin^2(theta/2) + (l0 + (1 - l0) cos(theta/2))^2)
/// with theta = theta_of_T(T; a_ext) and the total weight fixed to 1.
double collapse_model(double T_s, double a_ext, double lambda0, double delta_lambda, double a0,
                      const PulseConfig& tmpl);

/// Fits (a_ext, lambda0, delta_lambda, a0) to an amplitude-versus-T series. A log
/// scan over a_ext with the remaining parameters solved linearly in cos(theta/2)
/// seeds a bounded least-squares refinement.
CollapseFitResult fit_collapse_curve(std::span<const CollapsePoint> points, const PulseConfig& tmpl,
                                     const CollapseFitOptions& options = {});

}  // namespace peac
