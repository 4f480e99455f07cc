#include "peac/peac_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include "peac/dataset.hpp"
#include "peac/error.hpp"

namespace peac {

namespace {

constexpr double kPi = std::numbers::pi;

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Position where the count first drops to `level` walking from `start` in
// direction `dir`, linearly interpolated between bin centres.
// With past_edge, bins beyond the histogram range count as empty.
std::optional<double> find_drop(const Histogram& h, std::size_t start, int dir, double level, bool past_edge) {
  auto i = static_cast<long>(start);
  const auto n = static_cast<long>(h.bins());
  while (true) {
    const long next = i + dir;
    const bool outside = next < 0 || next >= n;
    if (outside && !past_edge) return std::nullopt;
    const auto ci = static_cast<double>(h.counts[static_cast<std::size_t>(i)]);
    const double cn = outside ? 0.0 : static_cast<double>(h.counts[static_cast<std::size_t>(next)]);
    if (cn <= level) {
      const double xi = h.center(static_cast<std::size_t>(i));
      const double xn = xi + dir * h.bin_width();
      const double t = ci > cn ? (ci - level) / (ci - cn) : 1.0;
      return xi + t * (xn - xi);
    }
    i = next;
  }
}

double ratio_checked(double a, double a0) {
  require_finite(a, "amplitude");
  require_finite(a0, "a0");
  if (a0 <= 0.0) fail(Errc::undefined_phase, "a0 must be > 0 to reconstruct a phase");
  double ratio = std::max(a, 0.0) / (std::numbers::sqrt2 * a0);
  if (ratio > 1.0 + kArccosClampTolerance)
    fail(Errc::inconsistent_amplitude,
         "amplitude exceeds sqrt(2) a0 beyond tolerance (ratio " + std::to_string(ratio) + ")");
  return std::min(ratio, 1.0);
}

}  // namespace

double drop_to_sigma_factor(double k) { return std::sqrt(-1.0 / (2.0 * std::log(k))); }

InitialGuess initial_guesses(const Histogram& h, double data_mean) {
  if (h.bins() < 1 || h.total == 0) fail(Errc::invalid_parameter, "empty histogram");

  // One candidate per side of the mean. The sharper outward drop is the one least
  // broadened by count noise, unless its density matches the histogram far worse,
  // which is how a noise spike near the mean shows up.
  struct Candidate {
    PdfParams params;
    bool edge = false;
    double mismatch = 0.0;
  };
  const std::vector<double> density = h.densities();
  std::vector<Candidate> candidates;
  for (int outward : {-1, +1}) {
    std::optional<std::size_t> peak;
    for (std::size_t i = 0; i < h.bins(); ++i) {
      const bool side = outward > 0 ? h.center(i) >= data_mean : h.center(i) < data_mean;
      if (side && (!peak || h.counts[i] > h.counts[*peak])) peak = i;
    }
    if (!peak || h.counts[*peak] == 0) continue;
    const double s_max = h.center(*peak);
    const double level = kGuessDropFraction * static_cast<double>(h.counts[*peak]);
    Candidate c;
    auto drop = find_drop(h, *peak, outward, level, false);
    if (!drop) {
      drop = find_drop(h, *peak, outward, level, true);
      c.edge = true;
    }
    // A bin cannot resolve structure narrower than half its width.
    const double sigma = std::max(std::abs(s_max - *drop) * drop_to_sigma_factor(), 0.5 * h.bin_width());
    c.params = {std::abs(s_max - data_mean) + sigma, data_mean, sigma};
    for (std::size_t i = 0; i < h.bins(); ++i) {
      const double r = pdf_eval(h.center(i), c.params) - density[i];
      c.mismatch += r * r;
    }
    candidates.push_back(c);
  }
  if (candidates.empty()) fail(Errc::invalid_parameter, "histogram has no populated bin");
  const Candidate* pick = &candidates.front();
  if (candidates.size() == 2) {
    const Candidate& a = candidates[0];
    const Candidate& b = candidates[1];
    const bool a_sharper = a.params.sigma <= b.params.sigma;
    const Candidate& sharp = a_sharper ? a : b;
    const Candidate& broad = a_sharper ? b : a;
    pick = sharp.mismatch <= kGuessMismatchVeto * broad.mismatch ? &sharp : &broad;
  }
  return {pick->params, pick->edge};
}

InitialGuess initial_guesses(const Histogram& h) {
  double weighted = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) weighted += h.center(i) * static_cast<double>(h.counts[i]);
  return initial_guesses(h, weighted / static_cast<double>(h.total));
}

PdfFit fit_pdf(const Histogram& h, const PdfParams& guess, const PdfFitOptions& options) {
  const auto& b = options.bounds;
  if (!(b.lower <= b.upper)) fail(Errc::invalid_parameter, "amplitude bounds are inverted");
  if (h.bins() < 3) fail(Errc::invalid_parameter, "pdf fit needs at least 3 bins");

  const std::vector<double> centers = [&] {
    std::vector<double> c(h.bins());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = h.center(i);
    return c;
  }();
  const std::vector<double> target = h.densities();
  const double width = h.bin_width();
  const double span = h.bin_edges.back() - h.bin_edges.front();
  const double sigma_floor = 1e-6 * span;

  ResidualFn residual = [&](std::span<const double> x, std::span<double> r) {
    const PdfParams p{x[0], x[1], x[2]};
    for (std::size_t i = 0; i < centers.size(); ++i) r[i] = pdf_eval(centers[i], p) - target[i];
  };

  LsqBounds bounds = LsqBounds::unbounded(3);
  bounds.lower[0] = b.lower;
  bounds.upper[0] = b.upper;
  bounds.lower[2] = sigma_floor;

  std::vector<double> x0 = {std::clamp(guess.amplitude, b.lower, b.upper), guess.mean,
                            std::max(guess.sigma, sigma_floor)};
  const LsqResult res = least_squares(residual, x0, centers.size(), bounds, options.lsq);
  if (!res.converged)
    throw FitFailure("pdf fit did not converge after " + std::to_string(res.iterations) + " iterations",
                     res.x);

  PdfFit fit;
  fit.params = {res.x[0], res.x[1], res.x[2]};
  fit.converged = true;
  fit.residual = 2.0 * res.cost;
  fit.iterations = res.iterations;
  fit.bin_width = width;
  return fit;
}

PdfFit fit_values(std::span<const double> values, const PdfFitOptions& options) {
  const Histogram h = bin(values);
  const InitialGuess g = initial_guesses(h, mean_of(values));
  PdfFit fit = fit_pdf(h, g.params, options);
  fit.low_confidence_guess = g.low_confidence;
  return fit;
}

ChannelSuiteFit fit_channel_suite(std::span<const double> plus, std::span<const double> minus) {
  if (plus.empty() || minus.empty())
    fail(Errc::incomplete_dataset, "channel suite needs both plus and minus samples");
  if (plus.size() != minus.size())
    fail(Errc::incomplete_dataset, "plus and minus channels differ in shot count");

  ChannelSuiteFit out;
  out.plus = fit_values(plus);
  out.minus = fit_values(minus);
  out.a0 = 0.5 * (out.plus.params.amplitude + out.minus.params.amplitude);

  std::vector<double> sum(plus.size()), diff(plus.size());
  for (std::size_t i = 0; i < plus.size(); ++i) {
    sum[i] = sum_signal(plus[i], minus[i]);
    diff[i] = diff_signal(plus[i], minus[i]);
  }

  const double sigma_seed = 0.5 * (out.plus.params.sigma + out.minus.params.sigma);
  const double narrowest_bin = std::min(out.plus.bin_width, out.minus.bin_width);
  PdfFitOptions bounded;
  bounded.bounds = {0.0, std::numbers::sqrt2 * out.a0};

  auto fit_projection = [&](std::span<const double> values) {
    const Histogram h = bin(values);
    InitialGuess g = initial_guesses(h, mean_of(values));
    if (sigma_seed >= narrowest_bin) g.params.sigma = sigma_seed;
    PdfFit fit = fit_pdf(h, g.params, bounded);
    fit.low_confidence_guess = g.low_confidence;
    return fit;
  };
  out.sum = fit_projection(sum);
  out.diff = fit_projection(diff);
  return out;
}

ChannelSuiteFit fit_channel_suite(const Dataset& data, double T_s) {
  const auto plus = data.values(T_s, Channel::plus);
  const auto minus = data.values(T_s, Channel::minus);
  if (plus.empty() || minus.empty())
    fail(Errc::incomplete_dataset, "dataset lacks plus or minus channel at T_s=" + std::to_string(T_s));
  return fit_channel_suite(plus, minus);
}

double reconstruct_theta_two_state(double a_sum, double a0) {
  return 2.0 * std::acos(ratio_checked(a_sum, a0));
}

double reconstruct_theta_from_diff(double a_diff, double a0) {
  return 2.0 * std::asin(ratio_checked(a_diff, a0));
}

double reconstruct_theta_favorable(const ChannelSuiteFit& fit) {
  if (fit.sum.params.amplitude <= fit.diff.params.amplitude)
    return reconstruct_theta_two_state(fit.sum.params.amplitude, fit.a0);
  return reconstruct_theta_from_diff(fit.diff.params.amplitude, fit.a0);
}

ThreeStateBranches reconstruct_theta_three_state(double a_all, const MixtureModel& weights) {
  weights.validate();
  require_finite(a_all, "a_all");
  if (weights.a0 <= 0.0) fail(Errc::undefined_phase, "a0 must be > 0 to reconstruct a phase");

  const double l0 = weights.lambda_0;
  const double dl = weights.delta_lambda();
  const double total = weights.lambda_total();
  const double pair = total - l0;
  const double denom = dl * dl - pair * pair;
  const double scale = std::max({dl * dl, pair * pair, 1e-300});
  if (std::abs(denom) <= 1e-12 * scale)
    fail(Errc::branch_degenerate, "amplitude law is degenerate for these weights");

  const double r = a_all / weights.a0;
  const double centre = l0 * pair / denom;
  double radicand = dl * dl * (dl * dl + 2.0 * total * l0 - total * total) / (denom * denom) -
                    r * r / denom;
  if (radicand < 0.0) {
    if (radicand < -1e-9 * std::max(1.0, centre * centre))
      fail(Errc::inconsistent_amplitude, "amplitude is not reachable with these weights");
    radicand = 0.0;
  }
  const double root = std::sqrt(radicand);

  ThreeStateBranches out;
  out.cos_half = {centre + root, centre - root};
  for (std::size_t k = 0; k < 2; ++k) {
    const double c = out.cos_half[k];
    if (std::abs(c) <= 1.0 + kArccosClampTolerance)
      out.theta[k] = 2.0 * std::acos(std::clamp(c, -1.0, 1.0));
  }
  if (!out.theta[0] && !out.theta[1])
    fail(Errc::inconsistent_amplitude, "amplitude is not reachable with these weights");
  return out;
}

std::vector<double> unwrap(std::span<const double> wrapped) {
  const std::size_t n = wrapped.size();
  if (n < 2) return {wrapped.begin(), wrapped.end()};

  auto candidates = [&](std::size_t i) {
    if (i == 0) return std::vector<double>{wrapped[0]};
    std::vector<double> c;
    for (std::size_t m = 0; m <= i; ++m) {
      const double base = 2.0 * kPi * static_cast<double>(m);
      if (m > 0) c.push_back(base - wrapped[i]);
      c.push_back(base + wrapped[i]);
    }
    return c;
  };
  auto step_cost = [](double from, double to) {
    const double d = to - from;
    return d >= 0.0 ? d * d : kUnwrapDecreasePenalty * d * d;
  };

  std::vector<std::vector<double>> values(n);
  std::vector<std::vector<std::size_t>> parent(n);
  std::vector<double> cost{0.0};
  values[0] = candidates(0);
  for (std::size_t i = 1; i < n; ++i) {
    values[i] = candidates(i);
    std::vector<double> next(values[i].size(), std::numeric_limits<double>::infinity());
    parent[i].assign(values[i].size(), 0);
    for (std::size_t k = 0; k < values[i].size(); ++k) {
      for (std::size_t j = 0; j < values[i - 1].size(); ++j) {
        const double c = cost[j] + step_cost(values[i - 1][j], values[i][k]);
        if (c < next[k]) {
          next[k] = c;
          parent[i][k] = j;
        }
      }
    }
    cost = std::move(next);
  }

  std::vector<double> out(n);
  std::size_t k = static_cast<std::size_t>(std::min_element(cost.begin(), cost.end()) - cost.begin());
  for (std::size_t i = n; i-- > 0;) {
    out[i] = values[i][k];
    if (i > 0) k = parent[i][k];
  }
  return out;
}

}  // namespace peac
