#include "peac/collapse_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "peac/error.hpp"
#include "peac/least_squares.hpp"

namespace peac {

namespace {

struct Seed {
  double a_ext, lambda0, delta_lambda, a0;
};

double half_cos(double T_s, double a_ext, const PulseConfig& tmpl) {
  PulseConfig cfg = tmpl;
  cfg.T = T_s;
  cfg.a_ext = a_ext;
  return std::cos(0.5 * theta_of_T(cfg));
}

// A^2 = alpha + beta c + delta c^2 is linear in c = cos(theta/2) once a_ext is fixed.
// Both roots for lambda0 are returned; unphysical solutions give no seeds.
std::vector<Seed> linear_seeds(std::span<const CollapsePoint> pts, double a_ext, const PulseConfig& tmpl) {
  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd X(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double c = half_cos(pts[static_cast<std::size_t>(i)].T_s, a_ext, tmpl);
    X(i, 0) = 1.0;
    X(i, 1) = c;
    X(i, 2) = c * c;
    const double a = pts[static_cast<std::size_t>(i)].amplitude;
    y(i) = a * a;
  }
  const Eigen::Vector3d coef = X.colPivHouseholderQr().solve(y);
  const double a0_sq = coef.sum();
  if (!(a0_sq > 0.0)) return {};
  const double disc = 1.0 - 2.0 * coef(1) / a0_sq;
  if (disc < 0.0) return {};

  std::vector<Seed> seeds;
  for (double sign : {-1.0, 1.0}) {
    const double l0 = 0.5 * (1.0 + sign * std::sqrt(disc));
    const double dl_sq = coef(0) / a0_sq - l0 * l0;
    seeds.push_back({a_ext, std::clamp(l0, 0.0, 1.0), std::sqrt(std::max(dl_sq, 0.0)), std::sqrt(a0_sq)});
  }
  return seeds;
}

}  // namespace

double collapse_model(double T_s, double a_ext, double lambda0, double delta_lambda, double a0,
                      const PulseConfig& tmpl) {
  const double c = half_cos(T_s, a_ext, tmpl);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double in_phase = lambda0 + (1.0 - lambda0) * c;
  return a0 * std::sqrt(delta_lambda * delta_lambda * s * s + in_phase * in_phase);
}

CollapseFitResult fit_collapse_curve(std::span<const CollapsePoint> points, const PulseConfig& tmpl,
                                     const CollapseFitOptions& options) {
  std::set<double> distinct;
  for (const auto& p : points) {
    require_finite(p.T_s, "T_s");
    require_finite(p.amplitude, "amplitude");
    distinct.insert(p.T_s);
  }
  if (distinct.size() < 4)
    fail(Errc::invalid_parameter, "collapse fit needs at least 4 distinct interrogation times");
  if (!(options.scan_low > 0.0 && options.scan_high > options.scan_low && options.scan_points >= 2))
    fail(Errc::invalid_parameter, "invalid acceleration scan window");

  const double centre = tmpl.a_ext > 0.0 ? tmpl.a_ext : options.default_a_ext;
  const double log_lo = std::log(centre * options.scan_low);
  const double log_hi = std::log(centre * options.scan_high);

  // Keep the seeds from the few best scan positions; neighbouring a_ext values
  // alias onto the same fringe pattern, so more than one basin is refined.
  std::vector<std::pair<double, Seed>> ranked;
  for (int k = 0; k < options.scan_points; ++k) {
    const double a = std::exp(log_lo + (log_hi - log_lo) * k / (options.scan_points - 1));
    for (const auto& s : linear_seeds(points, a, tmpl)) {
      double ss = 0.0;
      for (const auto& p : points) {
        const double r = collapse_model(p.T_s, s.a_ext, s.lambda0, s.delta_lambda, s.a0, tmpl) - p.amplitude;
        ss += r * r;
      }
      if (std::isfinite(ss)) ranked.emplace_back(ss, s);
    }
  }
  if (ranked.empty()) fail(Errc::fit_failure, "collapse scan found no admissible parameters");
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::size_t m = points.size();
  ResidualFn residual = [&](std::span<const double> x, std::span<double> r) {
    for (std::size_t i = 0; i < m; ++i)
      r[i] = collapse_model(points[i].T_s, x[0], x[1], x[2], x[3], tmpl) - points[i].amplitude;
  };
  LsqBounds bounds = LsqBounds::unbounded(4);
  bounds.lower = {0.0, 0.0, 0.0, 0.0};
  bounds.upper = {std::numeric_limits<double>::infinity(), 1.0, 1.0,
                  std::numeric_limits<double>::infinity()};
  LsqOptions lsq;
  lsq.max_iterations = 300;

  LsqResult best;
  const std::size_t tries = std::min<std::size_t>(ranked.size(), 6);
  for (std::size_t t = 0; t < tries; ++t) {
    const Seed& s = ranked[t].second;
    LsqResult res = least_squares(residual, {s.a_ext, s.lambda0, s.delta_lambda, s.a0}, m, bounds, lsq);
    if (res.cost < best.cost) best = std::move(res);
  }

  CollapseFitResult out;
  out.a_ext = best.x[0];
  out.lambda0 = best.x[1];
  out.delta_lambda = best.x[2];
  out.a0 = best.x[3];
  out.converged = best.converged;
  out.residual = 2.0 * best.cost;
  const double dof = static_cast<double>(m) - 4.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto se = [&](int k) {
    if (best.inverse_hessian.empty() || dof <= 0.0) return nan;
    const double v = best.inverse_hessian[static_cast<std::size_t>(k * 4 + k)] * out.residual / dof;
    return v >= 0.0 ? std::sqrt(v) : nan;
  };
  out.a_ext_se = se(0);
  out.lambda0_se = se(1);
  out.delta_lambda_se = se(2);
  out.a0_se = se(3);
  if (!out.converged)
    throw FitFailure("collapse-curve fit did not converge after " + std::to_string(best.iterations) +
                         " iterations",
                     best.x);
  return out;
}

}  // namespace peac
