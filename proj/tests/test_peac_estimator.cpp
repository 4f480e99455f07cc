#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "peac/dataset.hpp"
#include "peac/error.hpp"
#include "peac/histogram.hpp"
#include "peac/peac_estimator.hpp"
#include "peac/replication.hpp"
#include "peac/signal_model.hpp"

using namespace peac;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

// Independent sampler for S = B + A cos(phi).
std::vector<double> fringe_samples(double A, double mu, double sigma, std::size_t n, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  std::normal_distribution<double> noise(mu, sigma);
  std::vector<double> v(n);
  for (auto& x : v) x = noise(rng) + A * std::cos(phase(rng));
  return v;
}

BivariateSample pair_samples(double a0, double sigma, double theta, std::size_t n, std::uint64_t seed) {
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  std::normal_distribution<double> noise(0.0, sigma);
  BivariateSample s;
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = phase(rng);
    s.plus.push_back(noise(rng) + a0 * std::cos(phi + theta / 2));
    s.minus.push_back(noise(rng) + a0 * std::cos(phi - theta / 2));
  }
  return s;
}

}  // namespace

TEST_CASE("drop multiplier for k = 1/4") {
  CHECK(drop_to_sigma_factor() == doctest::Approx(std::sqrt(1.0 / (2.0 * std::log(4.0)))));
  CHECK(drop_to_sigma_factor() == doctest::Approx(0.6006).epsilon(1e-4));
}

TEST_CASE("two-spike histogram guesses") {
  std::vector<double> v;
  for (int i = 0; i < 50; ++i) {
    v.push_back(-0.6);
    v.push_back(0.6);
  }
  const Histogram h = bin(v);
  const InitialGuess g = initial_guesses(h);
  CHECK(g.params.mean == doctest::Approx(0.0).scale(1.0));
  CHECK(g.params.amplitude >= 0.6 - 1e-12);
  CHECK(g.low_confidence);
}

TEST_CASE("initial guesses are close to the truth in most seeds") {
  int amplitude_ok = 0, sigma_ok = 0, sigma_close = 0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    const auto v = fringe_samples(0.824, 0.0, 0.063, 300, 1000 + s);
    const InitialGuess g = initial_guesses(bin(v));
    amplitude_ok += std::abs(g.params.amplitude / 0.824 - 1.0) < 0.5;
    const double r = g.params.sigma / 0.063;
    sigma_ok += r > 0.5 && r < 2.0;
    sigma_close += std::abs(r - 1.0) < 0.5;
  }
  CHECK(amplitude_ok >= 950);
  CHECK(sigma_ok >= 950);
  // Bins of about 1.6 sigma limit how sharply the outward drop is located.
  CHECK(sigma_close >= 650);
}

TEST_CASE("dense histogram recovers the generating parameters") {
  const auto v = fringe_samples(0.8, 0.0, 0.06, 1000000, 17);
  const PdfFit f = fit_values(v);
  CHECK(f.converged);
  CHECK(f.params.amplitude == doctest::Approx(0.8).epsilon(0.01));
  CHECK(f.params.sigma == doctest::Approx(0.06).epsilon(0.01));
  CHECK(f.double_peak());
}

TEST_CASE("zero-amplitude data fit to a single peak") {
  const auto v = fringe_samples(0.0, 0.1, 0.063, 300, 5);
  const PdfFit f = fit_values(v);
  CHECK_FALSE(f.double_peak());
  CHECK(f.params.amplitude < 0.063);
}

TEST_CASE("experiment-scale amplitude fits are unbiased on average") {
  double acc = 0.0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) acc += fit_values(fringe_samples(0.824, 0.0, 0.063, 300, 50000 + s)).params.amplitude;
  CHECK(acc / seeds == doctest::Approx(0.824).epsilon(0.02));
}

TEST_CASE("amplitude bounds are enforced") {
  const auto v = fringe_samples(0.8, 0.0, 0.06, 300, 8);
  PdfFitOptions opt;
  opt.bounds = {0.0, 0.5};
  const PdfFit f = fit_pdf(bin(v), initial_guesses(bin(v)).params, opt);
  CHECK(f.params.amplitude <= 0.5);
  opt.bounds = {1.0, 0.5};
  CHECK_THROWS_AS(fit_pdf(bin(v), {0.8, 0.0, 0.06}, opt), Error);
}

TEST_CASE("channel suite at in-phase, anti-phase and quadrature") {
  const double a0 = 0.824, sigma = 0.063;
  auto s = pair_samples(a0, sigma, 0.0, 300, 1);
  ChannelSuiteFit f = fit_channel_suite(s.plus, s.minus);
  CHECK(f.sum.params.amplitude == doctest::Approx(sqrt2 * f.a0).epsilon(0.03));
  CHECK(f.diff.params.amplitude < 0.1);

  s = pair_samples(a0, sigma, pi, 300, 2);
  f = fit_channel_suite(s.plus, s.minus);
  CHECK(f.sum.params.amplitude < 0.1);
  CHECK(f.diff.params.amplitude == doctest::Approx(sqrt2 * f.a0).epsilon(0.03));

  double sum_acc = 0.0, diff_acc = 0.0, energy = 0.0;
  const int seeds = 100;
  for (int k = 0; k < seeds; ++k) {
    s = pair_samples(a0, sigma, pi / 2, 300, 100 + k);
    f = fit_channel_suite(s.plus, s.minus);
    sum_acc += f.sum.params.amplitude;
    diff_acc += f.diff.params.amplitude;
    energy += (f.sum.params.amplitude * f.sum.params.amplitude + f.diff.params.amplitude * f.diff.params.amplitude) /
              (2.0 * f.a0 * f.a0);
    CHECK(f.sum.params.amplitude <= sqrt2 * f.a0 + 1e-12);
  }
  CHECK(sum_acc / seeds == doctest::Approx(a0).epsilon(0.05));
  CHECK(diff_acc / seeds == doctest::Approx(a0).epsilon(0.05));
  CHECK(energy / seeds == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("channel suite needs both state channels") {
  Dataset d;
  for (int i = 0; i < 30; ++i) d.add({1e-3, i, 0, Channel::plus, std::cos(0.3 * i)});
  CHECK_THROWS_AS(fit_channel_suite(d, 1e-3), Error);
  try {
    fit_channel_suite(d, 1e-3);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::incomplete_dataset);
  }
}

TEST_CASE("two-state inversion") {
  const double a0 = 0.7;
  CHECK(reconstruct_theta_two_state(sqrt2 * a0, a0) == doctest::Approx(0.0).scale(1.0));
  CHECK(reconstruct_theta_two_state(0.0, a0) == doctest::Approx(pi));
  CHECK(reconstruct_theta_two_state(a0, a0) == doctest::Approx(pi / 2));
  CHECK(reconstruct_theta_two_state(sqrt2 * a0 * (1 + 5e-7), a0) == 0.0);
  CHECK_THROWS_AS(reconstruct_theta_two_state(sqrt2 * a0 * 1.01, a0), Error);
  CHECK_THROWS_AS(reconstruct_theta_two_state(0.3, 0.0), Error);
  try {
    reconstruct_theta_two_state(0.3, 0.0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::undefined_phase);
  }
  for (int i = 0; i <= 100; ++i) {
    const double theta = pi * i / 100.0;
    const double a_sum = sqrt2 * a0 * std::abs(std::cos(theta / 2));
    const double a_diff = sqrt2 * a0 * std::abs(std::sin(theta / 2));
    CHECK(std::abs(reconstruct_theta_two_state(a_sum, a0) - theta) < 1e-10 + 2e-8 * (i == 0));
    CHECK(std::abs(reconstruct_theta_from_diff(a_diff, a0) - theta) < 1e-10 + 2e-8 * (i == 100));
  }
}

TEST_CASE("three-state pointwise inversion") {
  MixtureModel balanced{0.0, 0.5, 0.5, 0.8, 0.0};
  auto b = reconstruct_theta_three_state(0.0, balanced);
  bool found_pi = false;
  for (const auto& t : b.theta)
    if (t && std::abs(*t - pi) < 1e-9) found_pi = true;
  CHECK(found_pi);

  MixtureModel single{1.0, 0.0, 0.0, 0.79, 0.0};
  CHECK_THROWS_AS(reconstruct_theta_three_state(0.79, single), Error);
  try {
    reconstruct_theta_three_state(0.79, single);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::branch_degenerate);
  }

  const MixtureModel protocol = MixtureModel::from_imbalance(0.42, 0.18, 0.79, 0.0);
  const double ratio = std::sqrt(0.18 * 0.18 + 0.42 * 0.42);
  CHECK(ratio == doctest::Approx(0.457).epsilon(1e-3));
  b = reconstruct_theta_three_state(0.79 * ratio, protocol);
  REQUIRE(b.theta[0].has_value());
  CHECK(std::abs(b.cos_half[0]) < 1e-9);
  CHECK(*b.theta[0] == doctest::Approx(pi));

  CHECK_THROWS_AS(reconstruct_theta_three_state(5.0, protocol), Error);
  try {
    reconstruct_theta_three_state(5.0, protocol);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::inconsistent_amplitude);
  }
}

TEST_CASE("three-state inversion recovers theta on one branch") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double l0 = 0.6 * u(rng), dl = (1.0 - l0) * (u(rng) - 0.5);
    MixtureModel m = MixtureModel::from_imbalance(l0, dl, 0.5 + u(rng), 2.0 * pi * u(rng));
    const auto b = reconstruct_theta_three_state(amplitude_three_state(m), m);
    double best = 1e9;
    for (const auto& t : b.theta)
      if (t) best = std::min(best, std::abs(*t - m.theta));
    CHECK(best < 1e-6);
  }
}

TEST_CASE("unwrap") {
  const std::vector<double> smooth{0.1, 0.4, 0.9, 1.5, 2.2};
  CHECK(unwrap(smooth) == smooth);
  const std::vector<double> one{2.5};
  CHECK(unwrap(one) == one);

  const double two_ka = 2.0 * 1.61054e7 * 0.0322;
  std::vector<double> truth, wrapped;
  for (int i = 0; i <= 20; ++i) {
    const double T = 1e-3 + i * 1e-4;
    truth.push_back(two_ka * T * T);
    wrapped.push_back(std::acos(std::cos(truth.back())));
  }
  const auto un = unwrap(wrapped);
  for (std::size_t i = 0; i < un.size(); ++i) CHECK(un[i] == doctest::Approx(truth[i]).epsilon(1e-9));
}

TEST_CASE("unwrap keeps a growing series through a fold that stops short of pi") {
  const std::vector<double> wrapped{2.313, 2.604, 2.855, 2.785, 2.446};
  const auto un = unwrap(wrapped);
  CHECK(un[3] == doctest::Approx(2.0 * pi - 2.785));
  CHECK(un[4] == doctest::Approx(2.0 * pi - 2.446));

  const std::vector<double> low{3.4, 4.3, 5.2, 6.0618, 2.0 * pi + 0.2163, 2.0 * pi + 0.755};
  std::vector<double> w;
  for (double x : low) w.push_back(std::acos(std::cos(x)));
  const auto un2 = unwrap(w);
  CHECK(un2[4] == doctest::Approx(2.0 * pi + 0.2163));
  CHECK(un2[5] == doctest::Approx(2.0 * pi + 0.755));

  const std::vector<double> noisy{1.093, 1.283, 1.523, 1.487, 2.073, 2.377};
  CHECK(unwrap(noisy) == noisy);
}

TEST_CASE("PEAC on the sum signal is unbiased at quadrature") {
  ReplicationConfig cfg;
  cfg.seed = 77;
  std::vector<double> theta;
  for (int d = 0; d < 1000; ++d) {
    const auto s = replicate_one(cfg, pi / 2, static_cast<std::size_t>(d));
    try {
      const auto f = fit_channel_suite(s.plus, s.minus);
      theta.push_back(reconstruct_theta_two_state(f.sum.params.amplitude, f.a0));
    } catch (const Error&) {
    }
  }
  CHECK(theta.size() >= 990);
  double mean = 0.0;
  for (double t : theta) mean += t;
  mean /= static_cast<double>(theta.size());
  double ss = 0.0;
  for (double t : theta) ss += (t - mean) * (t - mean);
  const double se = std::sqrt(ss / static_cast<double>(theta.size() - 1) / static_cast<double>(theta.size()));
  CHECK(std::abs(mean - pi / 2) <= 2.0 * se);
}
