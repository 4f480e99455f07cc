#include "peac/pdf.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "peac/error.hpp"

namespace peac {

namespace {

// exp(-w^2 / 2) < 1e-16 beyond this many standard deviations.
constexpr double kWindow = 8.6;

// Even order: the rule stores the positive abscissae only.
using Rule = boost::math::quadrature::gauss<double, 64>;

}  // namespace

double pdf_eval(double s, const PdfParams& p) {
  if (!(p.sigma > 0.0)) fail(Errc::singular_parameter, "pdf needs sigma > 0");
  const double d = s - p.mean;
  const double amp = std::abs(p.amplitude);
  const double inv_two_var = 0.5 / (p.sigma * p.sigma);
  const double norm = 1.0 / (std::numbers::pi * p.sigma * std::sqrt(2.0 * std::numbers::pi));

  if (amp == 0.0) return std::numbers::pi * norm * std::exp(-d * d * inv_two_var);

  const double lo_arg = (d - kWindow * p.sigma) / amp;
  const double hi_arg = (d + kWindow * p.sigma) / amp;
  if (lo_arg >= 1.0 || hi_arg <= -1.0) return 0.0;
  const double lo = std::asin(std::max(lo_arg, -1.0));
  const double hi = std::asin(std::min(hi_arg, 1.0));

  static const auto& nodes = Rule::abscissa();
  static const auto& weights = Rule::weights();
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double ep = d - amp * std::sin(mid + half * nodes[i]);
    const double em = d - amp * std::sin(mid - half * nodes[i]);
    sum += weights[i] * (std::exp(-ep * ep * inv_two_var) + std::exp(-em * em * inv_two_var));
  }
  return norm * half * sum;
}

std::size_t count_modes(const PdfParams& p, std::size_t grid_points) {
  if (grid_points < 3) fail(Errc::invalid_parameter, "mode count needs at least 3 grid points");
  const double amp = std::abs(p.amplitude);
  const double lo = p.mean - amp - 6.0 * p.sigma;
  const double hi = p.mean + amp + 6.0 * p.sigma;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  std::vector<double> f(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) f[i] = pdf_eval(lo + step * static_cast<double>(i), p);

  std::size_t modes = 0;
  for (std::size_t i = 1; i + 1 < grid_points; ++i) {
    if (f[i] > f[i - 1] && f[i] >= f[i + 1]) {
      // skip plateaus so a flat top counts once
      ++modes;
    }
  }
  return modes;
}

double peak_merge_threshold(double tolerance) {
  // The dip between the peaks sits at the mean and its depth scales with the
  // square of the distance to the threshold, so the grid is kept dense.
  constexpr std::size_t grid = 20001;
  auto modes_at = [](double ratio) { return count_modes({ratio, 0.0, 1.0}, grid); };

  double lo = 0.5, hi = 3.0;
  if (modes_at(lo) != 1 || modes_at(hi) != 2)
    fail(Errc::numerical_integration, "peak-merge bracket does not straddle the transition");
  // Scan for the first double-peaked ratio to avoid bisecting across spurious flips.
  for (double r = lo; r <= hi; r += 0.05) {
    if (modes_at(r) == 2) {
      hi = r;
      lo = r - 0.05;
      break;
    }
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (modes_at(mid) == 2 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace peac
