#include "peac/pulse_physics.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "peac/error.hpp"

namespace peac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rabi_train(double t, const PulseConfig& cfg, double omega0) {
  return omega0 * (blackman(t, cfg.tau) + 2.0 * blackman(t - cfg.T, cfg.tau) +
                   blackman(t - 2.0 * cfg.T, cfg.tau));
}

// Integral of t sin(phi_1(t)) over [0, 2T + tau]. phi_1 is accumulated cell by
// cell with Simpson's rule on Omega; the outer integral is composite Simpson on
// the same nodes. Segment boundaries sit on the pulse edges.
double sensitivity_integral(const PulseConfig& cfg, double pulse_step) {
  const double omega0 = cfg.rabi_peak();
  const std::array<double, 6> edges = {0.0,         cfg.tau,           cfg.T,
                                       cfg.T + cfg.tau, 2.0 * cfg.T, 2.0 * cfg.T + cfg.tau};
  double phase = 0.0;
  double total = 0.0;
  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double a = edges[seg];
    const double b = edges[seg + 1];
    const bool in_pulse = seg % 2 == 0;
    // Between pulses Omega = 0 and the integrand is linear in t.
    std::size_t cells = in_pulse ? static_cast<std::size_t>(std::ceil((b - a) / pulse_step)) : 2;
    if (cells % 2) ++cells;
    const double h = (b - a) / static_cast<double>(cells);

    double prev_t = a;
    double prev_f = prev_t * std::sin(phase);
    double seg_sum = 0.0;
    for (std::size_t i = 1; i <= cells; ++i) {
      const double t = a + h * static_cast<double>(i);
      if (in_pulse) {
        const double mid = 0.5 * (prev_t + t);
        phase += h / 6.0 *
                 (rabi_train(prev_t, cfg, omega0) + 4.0 * rabi_train(mid, cfg, omega0) +
                  rabi_train(t, cfg, omega0));
      }
      const double f = t * std::sin(phase);
      // Simpson weights 1,4,2,4,...,4,1 on the cell nodes.
      if (i == 1) seg_sum += prev_f;
      seg_sum += (i == cells) ? f : (i % 2 ? 4.0 * f : 2.0 * f);
      prev_t = t;
      prev_f = f;
    }
    total += seg_sum * h / 3.0;
  }
  return total;
}

}  // namespace

void PulseConfig::validate() const {
  require_finite(k_eff, "k_eff");
  require_finite(a_ext, "a_ext");
  require_finite(tau, "tau");
  require_finite(T, "T");
  require_finite(gamma, "gamma");
  if (k_eff <= 0.0) fail(Errc::invalid_parameter, "k_eff must be > 0");
  if (tau <= 0.0) fail(Errc::invalid_parameter, "tau must be > 0");
  if (T <= tau) fail(Errc::invalid_parameter, "T must exceed tau (pulses would overlap)");
}

double blackman(double t, double tau) noexcept {
  if (t < 0.0 || t > tau) return 0.0;
  const double x = t / tau;
  return 0.42 - 0.5 * std::cos(kTwoPi * x) + 0.08 * std::cos(2.0 * kTwoPi * x);
}

double finite_pulse_phase(const PulseConfig& cfg, const QuadratureOptions& options) {
  cfg.validate();
  if (!(options.max_step_fraction > 0.0))
    fail(Errc::invalid_parameter, "quadrature step fraction must be > 0");
  if (cfg.a_ext == 0.0) return 0.0;

  const double step = cfg.tau * options.max_step_fraction;
  const double coarse = sensitivity_integral(cfg, step);
  const double fine = sensitivity_integral(cfg, 0.5 * step);
  const double change = std::abs(fine - coarse);
  if (change > options.convergence_tolerance * std::abs(fine)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "pulse-phase quadrature not converged: step " << step << " s, relative change "
        << change / std::abs(fine) << " > " << options.convergence_tolerance;
    fail(Errc::numerical_integration, msg.str());
  }
  // The sensitivity of the pi/2-pi-pi/2 sequence makes the raw integral
  // negative; the sign is flipped so that theta follows 2 k a T^2.
  return -2.0 * cfg.k_eff * cfg.a_ext * fine;
}

double fit_gamma(double tau, std::span<const double> T_grid, const PulseConfig& base) {
  if (T_grid.size() < 2) fail(Errc::invalid_parameter, "gamma fit needs at least 2 grid points");
  PulseConfig cfg = base;
  cfg.tau = tau;
  if (cfg.a_ext == 0.0) cfg.a_ext = 1.0;  // theta is linear in a_ext

  // theta - 2kaT^2 = gamma * (2 k a tau T)
  double num = 0.0, den = 0.0;
  for (double T : T_grid) {
    cfg.T = T;
    const double theta = finite_pulse_phase(cfg);
    const double leading = 2.0 * cfg.k_eff * cfg.a_ext * T * T;
    const double x = 2.0 * cfg.k_eff * cfg.a_ext * tau * T;
    num += (theta - leading) * x;
    den += x * x;
  }
  return num / den;
}

double theta_of_T(const PulseConfig& cfg) {
  require_finite(cfg.T, "T");
  require_finite(cfg.a_ext, "a_ext");
  if (cfg.T < 0.0) fail(Errc::invalid_parameter, "T must be >= 0");
  return 2.0 * cfg.k_eff * cfg.a_ext * (cfg.T * cfg.T + cfg.gamma * cfg.tau * cfg.T);
}

double T_of_theta(const PulseConfig& cfg, double theta) {
  require_finite(theta, "theta");
  if (cfg.a_ext <= 0.0 || cfg.k_eff <= 0.0)
    fail(Errc::invalid_parameter, "T_of_theta needs a_ext > 0 and k_eff > 0");
  // T^2 + gamma tau T - q = 0
  const double q = theta / (2.0 * cfg.k_eff * cfg.a_ext);
  const double b = cfg.gamma * cfg.tau;
  const double disc = b * b + 4.0 * q;
  if (disc < 0.0) fail(Errc::no_solution, "no real interrogation time for this phase");
  const double root = std::sqrt(disc);
  const double T = (b > 0.0 && root + b > 0.0) ? 2.0 * q / (b + root) : 0.5 * (root - b);
  if (T < 0.0) fail(Errc::no_solution, "negative interrogation time for this phase");
  return T;
}

double fit_acceleration(std::span<const double> T, std::span<const double> theta,
                        const PulseConfig& cfg) {
  if (T.size() != theta.size() || T.empty())
    fail(Errc::invalid_parameter, "acceleration fit needs matching non-empty series");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    const double g = 2.0 * cfg.k_eff * (T[i] * T[i] + cfg.gamma * cfg.tau * T[i]);
    num += theta[i] * g;
    den += g * g;
  }
  if (den == 0.0) fail(Errc::invalid_parameter, "acceleration fit has no leverage");
  return num / den;
}

}  // namespace peac
