#include <doctest.h>

#include <cmath>
#include <limits>

#include "peac/least_squares.hpp"

using namespace peac;

TEST_CASE("linear model is solved exactly") {
  const std::vector<double> t{0, 1, 2, 3, 4, 5};
  ResidualFn f = [&](std::span<const double> x, std::span<double> r) {
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = x[0] + x[1] * t[i] - (1.5 - 0.25 * t[i]);
  };
  const auto res = least_squares(f, {0.0, 0.0}, t.size(), LsqBounds::unbounded(2));
  CHECK(res.converged);
  CHECK(res.x[0] == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(res.x[1] == doctest::Approx(-0.25).epsilon(1e-8));
  CHECK(res.cost < 1e-16);
  REQUIRE(res.inverse_hessian.size() == 4);
}

TEST_CASE("Rosenbrock valley converges") {
  ResidualFn f = [](std::span<const double> x, std::span<double> r) {
    r[0] = 10.0 * (x[1] - x[0] * x[0]);
    r[1] = 1.0 - x[0];
  };
  const auto res = least_squares(f, {-1.2, 1.0}, 2, LsqBounds::unbounded(2));
  CHECK(res.converged);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bounds are respected and an active bound is reported as the solution") {
  ResidualFn f = [](std::span<const double> x, std::span<double> r) {
    r[0] = x[0] - 2.0;
    r[1] = x[1] + 1.0;
  };
  LsqBounds b = LsqBounds::unbounded(2);
  b.upper[0] = 1.0;
  b.lower[1] = 0.0;
  const auto res = least_squares(f, {0.5, 0.5}, 2, b);
  CHECK(res.converged);
  CHECK(res.x[0] == doctest::Approx(1.0));
  CHECK(res.x[1] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("a kink in the residual does not stop the fit") {
  ResidualFn f = [](std::span<const double> x, std::span<double> r) {
    r[0] = std::abs(x[0] - 0.3) + 0.1 * (x[0] - 0.3);
    r[1] = x[1] - 0.7;
  };
  const auto res = least_squares(f, {1.0, 0.0}, 2, LsqBounds::unbounded(2));
  CHECK(res.x[0] == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(res.x[1] == doctest::Approx(0.7).epsilon(1e-6));
}
