#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "peac/collapse_fit.hpp"
#include "peac/error.hpp"

using namespace peac;

namespace {

// Amplitude law written out directly from the weights.
double law(double T, double a_ext, double l0, double dl, double a0) {
  const PulseConfig c;
  const double theta = 2.0 * c.k_eff * a_ext * (T * T + c.gamma * c.tau * T);
  const double sum = 1.0 - l0;
  const double s = std::sin(theta / 2), co = std::cos(theta / 2);
  return a0 * std::sqrt(dl * dl * s * s + (l0 + sum * co) * (l0 + sum * co));
}

std::vector<CollapsePoint> curve(double a_ext, double l0, double dl, double a0, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<CollapsePoint> pts;
  for (int i = 0; i <= 20; ++i) {
    const double T = 1e-3 + i * 1e-4;
    pts.push_back({T, law(T, a_ext, l0, dl, a0) * (1.0 + noise * n(rng))});
  }
  return pts;
}

PulseConfig tmpl() {
  PulseConfig c;
  c.a_ext = 0.03;
  return c;
}

}  // namespace

TEST_CASE("collapse model matches the written-out amplitude law") {
  for (double T : {1e-3, 1.7e-3, 2.9e-3})
    CHECK(collapse_model(T, 0.0322, 0.42, 0.18, 0.79, tmpl()) ==
          doctest::Approx(law(T, 0.0322, 0.42, 0.18, 0.79)).epsilon(1e-12));
}

TEST_CASE("noiseless collapse curve recovers all parameters") {
  const auto pts = curve(0.0322, 0.42, 0.18, 0.79, 0.0, 1);
  const auto r = fit_collapse_curve(pts, tmpl());
  CHECK(r.converged);
  CHECK(r.a_ext == doctest::Approx(0.0322).epsilon(1e-6));
  CHECK(r.lambda0 == doctest::Approx(0.42).epsilon(1e-6));
  CHECK(r.delta_lambda == doctest::Approx(0.18).epsilon(1e-6));
  CHECK(r.a0 == doctest::Approx(0.79).epsilon(1e-6));
}

TEST_CASE("collapse fit tolerates one percent amplitude noise") {
  int within = 0;
  for (int s = 0; s < 100; ++s) {
    const auto r = fit_collapse_curve(curve(0.0322, 0.42, 0.18, 0.79, 0.01, 100 + s), tmpl());
    if (std::abs(r.a_ext / 0.0322 - 1.0) < 0.01) ++within;
  }
  CHECK(within == 100);
}

TEST_CASE("balanced mixture fits an imbalance consistent with zero") {
  const auto r = fit_collapse_curve(curve(0.0322, 0.42, 0.0, 0.79, 0.01, 9), tmpl());
  // Pinned at the bound the amplitude is flat in delta_lambda and no standard error exists.
  if (std::isnan(r.delta_lambda_se))
    CHECK(r.delta_lambda < 1e-6);
  else
    CHECK(r.delta_lambda <= 3.0 * r.delta_lambda_se + 1e-3);
}

TEST_CASE("collapse fit input checks") {
  std::vector<CollapsePoint> few{{1e-3, 0.5}, {1.1e-3, 0.4}, {1.2e-3, 0.3}};
  CHECK_THROWS_AS(fit_collapse_curve(few, tmpl()), Error);
  few.push_back({1.3e-3, NAN});
  CHECK_THROWS_AS(fit_collapse_curve(few, tmpl()), Error);
}
