#include "peac/signal_model.hpp"

#include <cmath>
#include <string>

#include "peac/error.hpp"

namespace peac {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

bool SignalParams::is_physical() const noexcept {
  return std::abs(baseline_mean) + amplitude <= 1.0;
}

void SignalParams::validate() const {
  require_finite(amplitude, "amplitude");
  require_finite(baseline_mean, "baseline_mean");
  require_finite(baseline_sigma, "baseline_sigma");
  if (amplitude < 0.0) fail(Errc::invalid_parameter, "amplitude must be >= 0");
  if (baseline_sigma < 0.0) fail(Errc::invalid_parameter, "baseline_sigma must be >= 0");
}

bool MixtureModel::is_normalized(double tol) const noexcept {
  return std::abs(lambda_total() - 1.0) <= tol;
}

void MixtureModel::validate() const {
  require_finite(lambda_0, "lambda_0");
  require_finite(lambda_plus, "lambda_plus");
  require_finite(lambda_minus, "lambda_minus");
  require_finite(a0, "a0");
  require_finite(theta, "theta");
  if (lambda_0 < 0.0 || lambda_plus < 0.0 || lambda_minus < 0.0)
    fail(Errc::invalid_parameter, "mixture weights must be >= 0");
}

MixtureModel MixtureModel::two_state(double a0, double theta) noexcept {
  return {0.0, 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2, a0, theta};
}

MixtureModel MixtureModel::from_imbalance(double lambda_0, double delta_lambda, double a0,
                                          double theta, double total) noexcept {
  const double pair = total - lambda_0;
  return {lambda_0, 0.5 * (pair + delta_lambda), 0.5 * (pair - delta_lambda), a0, theta};
}

void ScanConfig::validate() const {
  if (phases.empty()) fail(Errc::invalid_parameter, "scan needs at least one phase");
  if (repetitions < 1) fail(Errc::invalid_parameter, "scan needs at least one repetition");
  for (double p : phases) require_finite(p, "scan phase");
}

ScanConfig ScanConfig::evenly_spaced(int phase_count, int repetitions, bool phase_stable,
                                     std::uint64_t seed) {
  if (phase_count < 1) fail(Errc::invalid_parameter, "phase count must be >= 1");
  ScanConfig scan;
  scan.phases.reserve(static_cast<std::size_t>(phase_count));
  for (int i = 0; i < phase_count; ++i) scan.phases.push_back(kTwoPi * i / phase_count);
  scan.repetitions = repetitions;
  scan.phase_stable = phase_stable;
  scan.seed = seed;
  scan.validate();
  return scan;
}

double scan_phase(const ScanConfig& scan, std::size_t index, Engine& rng) {
  if (scan.phase_stable) return scan.phases[index % scan.phases.size()];
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  return uniform(rng);
}

std::vector<double> generate_samples(const SignalParams& params, double theta_off,
                                     const ScanConfig& scan, std::size_t n, Engine& rng) {
  params.validate();
  require_finite(theta_off, "theta_off");
  scan.validate();
  if (n < 1) fail(Errc::invalid_parameter, "sample count must be >= 1");

  std::normal_distribution<double> baseline(0.0, 1.0);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi0 = scan_phase(scan, i, rng);
    const double b = params.baseline_mean + params.baseline_sigma * baseline(rng);
    out.push_back(b + params.amplitude * std::cos(phi0 + theta_off));
  }
  return out;
}

std::vector<double> generate_samples(const SignalParams& params, double theta_off,
                                     const ScanConfig& scan, std::size_t n) {
  Engine rng = make_stream(scan.seed);
  return generate_samples(params, theta_off, scan, n, rng);
}

Superposition superpose_cosines(std::span<const double> weights, std::span<const double> phases) {
  if (weights.empty()) fail(Errc::invalid_parameter, "superposition needs at least one term");
  if (weights.size() != phases.size())
    fail(Errc::invalid_parameter, "weights and phases differ in length");

  double c = 0.0, s = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require_finite(weights[i], "weight");
    require_finite(phases[i], "phase");
    c += weights[i] * std::cos(phases[i]);
    s += weights[i] * std::sin(phases[i]);
    scale += std::abs(weights[i]);
  }
  const double amplitude = std::hypot(c, s);
  if (amplitude <= 1e-12 * scale) return {0.0, 0.0};
  double offset = std::atan2(s, c);
  if (offset <= -std::numbers::pi) offset = std::numbers::pi;
  return {amplitude, offset};
}

double amplitude_three_state(const MixtureModel& model) {
  model.validate();
  const double half = 0.5 * model.theta;
  const double imbalance = model.delta_lambda() * std::sin(half);
  const double balanced = model.lambda_0 + (model.lambda_plus + model.lambda_minus) * std::cos(half);
  return std::abs(model.a0) * std::hypot(imbalance, balanced);
}

double offset_phase_three_state(const MixtureModel& model) {
  model.validate();
  const double w[] = {model.lambda_0, model.lambda_plus, model.lambda_minus};
  const double p[] = {0.0, 0.5 * model.theta, -0.5 * model.theta};
  return superpose_cosines(w, p).offset_phase;
}

double rotate_bivariate(double s_minus, double s_plus, double alpha) noexcept {
  return s_minus * std::cos(alpha) + s_plus * std::sin(alpha);
}

double normalize_ports(double n0, double n1) {
  require_finite(n0, "n0");
  require_finite(n1, "n1");
  const double total = n0 + n1;
  if (total == 0.0) fail(Errc::division_degenerate, "port total is zero");
  return (n0 - n1) / total;
}

}  // namespace peac
