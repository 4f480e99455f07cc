#pragma once

#include <array>
#include <span>

namespace peac {

/// Conic c_minus_sq s-^2 + c0 s- s+ + c_plus_sq s+^2 + d_minus s- + d_plus s+ + d0 = 0
/// in the (s_minus, s_plus) plane, scaled to unit norm with positive quadratic terms.
struct ConicCoefficients {
  double c_plus_sq = 0.0;
  double c_minus_sq = 0.0;
  double c0 = 0.0;
  double d_plus = 0.0;
  double d_minus = 0.0;
  double d0 = 0.0;
  bool is_ellipse = false;

  /// c0^2 - 4 c_plus_sq c_minus_sq, negative for an ellipse.
  double discriminant() const noexcept { return c0 * c0 - 4.0 * c_plus_sq * c_minus_sq; }
};

/// Halir-Flusser direct least-squares ellipse fit on centred, isotropically
/// scaled points. Throws Errc::degenerate_geometry when the scatter matrix is
/// rank deficient (for example all points on one line).
ConicCoefficients fit_conic(std::span<const double> s_minus, std::span<const double> s_plus);

/// arccos(-c0 / sqrt(4 c_plus_sq c_minus_sq)) in [0, pi], argument clamped.
/// Throws Errc::sign_convention when a quadratic coefficient is not positive.
double theta_from_conic(const ConicCoefficients& c);

enum class Projection { sum, diff };

struct PrincipalAxes {
  std::array<double, 2> major{};  // unit vectors in (s_minus, s_plus)
  std::array<double, 2> minor{};
  /// Projection onto the minor axis, where the amplitude collapses.
  Projection favorable = Projection::sum;
  bool axis_ambiguous = false;      // circle, c0 ~ 0
  bool unequal_amplitudes = false;  // |c+ - c-| / (c+ + c-) > 0.05
};

PrincipalAxes principal_axes(const ConicCoefficients& c, double circle_tolerance = 1e-6);

}  // namespace peac
