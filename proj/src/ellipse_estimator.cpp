#include "peac/ellipse_estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "peac/error.hpp"

namespace peac {

namespace {

// Real roots of det(M - x I) = 0, each polished by Newton steps.
std::vector<double> real_eigenvalues(const Eigen::Matrix3d& M) {
  const double p = -M.trace();
  const double q = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0) + M(0, 0) * M(2, 2) - M(0, 2) * M(2, 0) +
                   M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1);
  const double r = -M.determinant();
  auto poly = [&](double x) { return ((x + p) * x + q) * x + r; };
  auto dpoly = [&](double x) { return (3.0 * x + 2.0 * p) * x + q; };

  const double P = q - p * p / 3.0;
  const double Q = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
  const double shift = -p / 3.0;
  std::vector<double> roots;
  if (P < 0.0 && 4.0 * P * P * P + 27.0 * Q * Q <= 0.0) {
    const double m = 2.0 * std::sqrt(-P / 3.0);
    const double arg = std::clamp(3.0 * Q / (P * m), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) + shift);
  } else {
    const double disc = std::sqrt(std::max(Q * Q / 4.0 + P * P * P / 27.0, 0.0));
    roots.push_back(std::cbrt(-Q / 2.0 + disc) + std::cbrt(-Q / 2.0 - disc) + shift);
  }
  for (double& x : roots) {
    for (int it = 0; it < 4; ++it) {
      const double d = dpoly(x);
      if (d == 0.0) break;
      const double step = poly(x) / d;
      if (!std::isfinite(step)) break;
      x -= step;
    }
  }
  return roots;
}

Eigen::Vector3d eigenvector(const Eigen::Matrix3d& M, double lambda) {
  const Eigen::Matrix3d K = M - lambda * Eigen::Matrix3d::Identity();
  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d v = K.row(i).transpose().cross(K.row((i + 1) % 3).transpose());
    if (v.squaredNorm() > best.squaredNorm()) best = v;
  }
  if (best.squaredNorm() == 0.0) best = Eigen::Vector3d::UnitX();
  best.normalize();
  // Inverse iteration with a slightly perturbed shift sharpens the cross-product estimate.
  const double eps = 1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff());
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(K - eps * Eigen::Matrix3d::Identity());
  if (lu.isInvertible()) {
    for (int it = 0; it < 2; ++it) {
      Eigen::Vector3d v = lu.solve(best);
      if (!v.allFinite() || v.norm() == 0.0) break;
      best = v.normalized();
    }
  }
  return best;
}

}  // namespace

ConicCoefficients fit_conic(std::span<const double> s_minus, std::span<const double> s_plus) {
  if (s_minus.size() != s_plus.size()) fail(Errc::invalid_parameter, "coordinate lists differ in length");
  const std::size_t n = s_minus.size();
  if (n < 6) fail(Errc::invalid_parameter, "conic fit needs at least 6 points");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    require_finite(s_minus[i], "s_minus");
    require_finite(s_plus[i], "s_plus");
    mx += s_minus[i];
    my += s_plus[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = s_minus[i] - mx, dy = s_plus[i] - my;
    spread += dx * dx + dy * dy;
  }
  const double s = std::sqrt(spread / (2.0 * static_cast<double>(n)));
  if (!(s > 0.0)) fail(Errc::degenerate_geometry, "all points coincide");

  Eigen::Matrix3d S1 = Eigen::Matrix3d::Zero(), S2 = Eigen::Matrix3d::Zero(), S3 = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (s_minus[i] - mx) / s, v = (s_plus[i] - my) / s;
    const Eigen::Vector3d q(u * u, u * v, v * v);
    const Eigen::Vector3d l(u, v, 1.0);
    S1 += q * q.transpose();
    S2 += q * l.transpose();
    S3 += l * l.transpose();
  }
  const Eigen::FullPivLU<Eigen::Matrix3d> s3(S3);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd3(S3);
  const auto sv = svd3.singularValues();
  if (!s3.isInvertible() || sv(2) <= 1e-12 * sv(0))
    fail(Errc::degenerate_geometry, "scatter matrix is rank deficient (points are collinear)");

  const Eigen::Matrix3d T = -s3.solve(S2.transpose());
  const Eigen::Matrix3d reduced = S1 + S2 * T;
  Eigen::Matrix3d C1inv;
  C1inv << 0.0, 0.0, 0.5, 0.0, -1.0, 0.0, 0.5, 0.0, 0.0;
  const Eigen::Matrix3d M = C1inv * reduced;
  if (!M.allFinite()) fail(Errc::degenerate_geometry, "reduced scatter matrix is not finite");

  Eigen::Vector3d a1 = Eigen::Vector3d::Zero();
  double best_constraint = -std::numeric_limits<double>::infinity();
  for (double lambda : real_eigenvalues(M)) {
    const Eigen::Vector3d v = eigenvector(M, lambda);
    const double constraint = 4.0 * v(0) * v(2) - v(1) * v(1);
    if (constraint > best_constraint) {
      best_constraint = constraint;
      a1 = v;
    }
  }
  const Eigen::Vector3d a2 = T * a1;

  // Back to the original coordinates: u = (x - mx) / s, v = (y - my) / s.
  const double s2 = s * s;
  const double A = a1(0) / s2, B = a1(1) / s2, C = a1(2) / s2;
  const double D = -2.0 * A * mx - B * my + a2(0) / s;
  const double E = -2.0 * C * my - B * mx + a2(1) / s;
  const double F = A * mx * mx + B * mx * my + C * my * my - a2(0) * mx / s - a2(1) * my / s + a2(2);

  Eigen::Matrix<double, 6, 1> coef;
  coef << A, B, C, D, E, F;
  if (A + C < 0.0) coef = -coef;
  coef.normalize();

  ConicCoefficients out;
  out.c_minus_sq = coef(0);
  out.c0 = coef(1);
  out.c_plus_sq = coef(2);
  out.d_minus = coef(3);
  out.d_plus = coef(4);
  out.d0 = coef(5);
  out.is_ellipse = best_constraint > 1e-12 && out.discriminant() < 0.0;
  return out;
}

double theta_from_conic(const ConicCoefficients& c) {
  if (!(c.c_plus_sq > 0.0) || !(c.c_minus_sq > 0.0))
    fail(Errc::sign_convention, "quadratic conic coefficients must be positive");
  const double arg = -c.c0 / std::sqrt(4.0 * c.c_plus_sq * c.c_minus_sq);
  return std::acos(std::clamp(arg, -1.0, 1.0));
}

PrincipalAxes principal_axes(const ConicCoefficients& c, double circle_tolerance) {
  if (!(c.c_plus_sq > 0.0) || !(c.c_minus_sq > 0.0))
    fail(Errc::sign_convention, "quadratic conic coefficients must be positive");
  const double h = 1.0 / std::numbers::sqrt2;
  const double quad_sum = c.c_plus_sq + c.c_minus_sq;

  PrincipalAxes axes;
  axes.unequal_amplitudes = std::abs(c.c_plus_sq - c.c_minus_sq) / quad_sum > 0.05;
  axes.axis_ambiguous = std::abs(c.c0) <= circle_tolerance * std::sqrt(4.0 * c.c_plus_sq * c.c_minus_sq);
  const double sgn = c.c0 >= 0.0 ? 1.0 : -1.0;
  axes.minor = {h, sgn * h};
  axes.major = {h, -sgn * h};
  axes.favorable = sgn > 0.0 ? Projection::sum : Projection::diff;
  return axes;
}

}  // namespace peac
