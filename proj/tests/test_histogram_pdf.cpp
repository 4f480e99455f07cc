#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "peac/error.hpp"
#include "peac/histogram.hpp"
#include "peac/pdf.hpp"

using namespace peac;
using std::numbers::pi;

namespace {

double simpson(auto&& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

// Curvature of the density at its centre changes sign where
// integral over u of (r^2 sin^2 u - 1) exp(-r^2 sin^2 u / 2) vanishes.
double centre_curvature(double r) {
  return simpson(
      [&](double u) {
        const double x = r * std::sin(u);
        return (x * x - 1.0) * std::exp(-0.5 * x * x);
      },
      -pi / 2, pi / 2, 4000);
}

double merge_ratio_oracle() {
  double lo = 1.0, hi = 3.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (centre_curvature(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("square-root bin rule") {
  CHECK(default_bin_count(300) == 18);
  CHECK(default_bin_count(100) == 10);
  std::vector<double> v(300);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * static_cast<double>(i));
  const Histogram h = bin(v);
  CHECK(h.bins() == 18);
  CHECK(h.bin_edges.front() == *std::min_element(v.begin(), v.end()));
  CHECK(h.bin_edges.back() == *std::max_element(v.begin(), v.end()));
  std::size_t total = 0;
  for (auto c : h.counts) total += c;
  CHECK(total == 300);
  CHECK(h.total == 300);
  for (std::size_t i = 1; i < h.bin_edges.size(); ++i) CHECK(h.bin_edges[i] > h.bin_edges[i - 1]);
}

TEST_CASE("explicit bin count") {
  const std::vector<double> v{0, 1, 2, 3};
  const Histogram h = bin(v, 2);
  REQUIRE(h.bins() == 2);
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 2);
}

TEST_CASE("uniform samples fill bins within binomial spread") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(10000);
  for (auto& x : v) x = u(rng);
  const Histogram h = bin(v);
  REQUIRE(h.bins() == 100);
  for (auto c : h.counts) CHECK(std::abs(static_cast<double>(c) - 100.0) <= 5.0 * 10.0);
}

TEST_CASE("degenerate histogram inputs") {
  const std::vector<double> same{0.3, 0.3, 0.3};
  CHECK_THROWS_AS(bin(same), Error);
  try {
    bin(same);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_range);
  }
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(bin(one), Error);
}

TEST_CASE("pdf limits") {
  CHECK(pdf_eval(0.0, {0.0, 0.0, 1.0}) == doctest::Approx(1.0 / std::sqrt(2 * pi)).epsilon(1e-12));
  CHECK(pdf_eval(0.5, {1.0, 0.0, 1e-4}) == doctest::Approx(1.0 / (pi * std::sqrt(0.75))).epsilon(1e-3));
  CHECK_THROWS_AS(pdf_eval(0.0, {1.0, 0.0, 0.0}), Error);
  CHECK(pdf_eval(5.0, {0.8, 0.0, 0.06}) >= 0.0);
}

TEST_CASE("pdf normalizes to one across the amplitude and noise grid") {
  for (double A : {0.05, 0.1, 0.3, 0.6, 0.8, 1.2}) {
    for (double s : {0.01, 0.03, 0.06, 0.2, 0.5}) {
      const PdfParams p{A, 0.1, s};
      const int intervals = 2 * static_cast<int>(std::ceil((A + 8 * s) / (s / 40.0)));
      const double mass = simpson([&](double x) { return pdf_eval(x, p); }, p.mean - A - 8 * s, p.mean + A + 8 * s,
                                  intervals);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("pdf is symmetric about the mean") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (int i = 0; i < 200; ++i) {
    const PdfParams p{u(rng), u(rng) - 0.75, 0.01 + 0.3 * u(rng)};
    const double x = u(rng);
    CHECK(pdf_eval(p.mean + x, p) == doctest::Approx(pdf_eval(p.mean - x, p)).epsilon(1e-10).scale(1e-300));
  }
}

TEST_CASE("mode counting and the peak-merge threshold") {
  CHECK(count_modes({3.0, 0.0, 1.0}) == 2);
  CHECK(count_modes({1.0, 0.0, 1.0}) == 1);
  CHECK(count_modes({0.0, 0.0, 1.0}) == 1);
  CHECK(PdfParams{0.824, 0.0, 0.063}.double_peak());
  CHECK_FALSE(PdfParams{0.1, 0.0, 0.063}.double_peak());

  const double measured = peak_merge_threshold();
  const double oracle = merge_ratio_oracle();
  CHECK(measured == doctest::Approx(oracle).epsilon(1e-3));
  CHECK(measured >= 1.77);
  CHECK(measured <= 1.79);
  CHECK(measured == doctest::Approx(kPeakMergeRatio).epsilon(1e-3));
}
