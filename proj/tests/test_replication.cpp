#include <doctest.h>

#include <atomic>
#include <cstring>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "peac/error.hpp"
#include "peac/replication.hpp"

using namespace peac;
using std::numbers::pi;

namespace {

double mean_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("bootstrap of constant data has zero spread") {
  const std::vector<double> v(50, 2.5);
  const auto r = bootstrap(v, 100, mean_of, 1);
  CHECK(r.mean == 2.5);
  CHECK(r.std == 0.0);
  CHECK(r.n_used == 100);
}

TEST_CASE("bootstrap standard error of the mean") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(300);
  for (auto& x : v) x = n(rng);
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double se = std::sqrt(ss / 299.0) / std::sqrt(300.0);
  const auto r = bootstrap(v, 1000, mean_of, 42);
  CHECK(r.std >= 0.8 * se);
  CHECK(r.std <= 1.2 * se);
}

TEST_CASE("bootstrap includes the original sample and counts failures") {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
  int calls = 0;
  bool first_is_identity = false;
  const auto r = bootstrap_indices(
      v.size(), 50,
      [&](std::span<const std::size_t> idx) {
        if (calls++ == 0) {
          first_is_identity = true;
          for (std::size_t i = 0; i < idx.size(); ++i) first_is_identity = first_is_identity && idx[i] == i;
        }
        if (calls % 5 == 0) fail(Errc::fit_failure, "synthetic failure");
        return 1.0;
      },
      9);
  CHECK(first_is_identity);
  CHECK(r.n_failures == 10);
  CHECK(r.n_used == 40);
  CHECK_THROWS_AS(bootstrap(v, 1, mean_of, 0), Error);
  const std::vector<double> none;
  CHECK_THROWS_AS(bootstrap(none, 10, mean_of, 0), Error);
}

TEST_CASE("bootstrap is deterministic per seed") {
  std::vector<double> v(100);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.7 * static_cast<double>(i));
  const auto a = bootstrap(v, 200, mean_of, 5), b = bootstrap(v, 200, mean_of, 5);
  CHECK(a.std == b.std);
  CHECK(a.mean == b.mean);
}

TEST_CASE("replicated channels are correlated according to theta") {
  ReplicationConfig cfg;
  cfg.sigma = 1e-9;
  CHECK(correlation(replicate_one(cfg, 0.0, 0).plus, replicate_one(cfg, 0.0, 0).minus) ==
        doctest::Approx(1.0).epsilon(1e-6));
  const auto anti = replicate_one(cfg, pi, 0);
  CHECK(correlation(anti.plus, anti.minus) == doctest::Approx(-1.0).epsilon(1e-6));

  ReplicationConfig defaults;
  defaults.n_datasets = 200;
  double acc = 0.0;
  for (const auto& s : replicate(defaults, pi / 2)) acc += correlation(s.plus, s.minus);
  CHECK(std::abs(acc / 200.0) < 0.05);
  CHECK(replicate(defaults, pi / 2).size() == 200);
}

TEST_CASE("branch fixing toward the set phase") {
  CHECK(fix_branch(2.9, pi) == doctest::Approx(2.9));
  CHECK(fix_branch(0.1, 2 * pi) == doctest::Approx(2 * pi - 0.1));
  CHECK(fix_branch(0.2, 0.0) == doctest::Approx(-0.2));
  CHECK(fix_branch(0.2, 0.1) == doctest::Approx(0.2));
  CHECK(fix_branch(0.5, 2 * pi + 0.4) == doctest::Approx(2 * pi + 0.5));
  CHECK(fix_branch(pi - 0.3, 1.2 * pi) == doctest::Approx(pi + 0.3));
  CHECK(fix_branch(0.0, 2 * pi) == doctest::Approx(2 * pi));
}

TEST_CASE("a noise spike next to the mean does not collapse the sum fit") {
  // This sample's sum histogram has its tallest right-of-mean bin beside the mean.
  ReplicationConfig cfg;
  cfg.seed = 20240601;
  const double theta = 1.2 * pi;
  const DatasetEstimate e = estimate_sample(replicate_one(cfg, theta, 233));
  REQUIRE(e.peac_sum.has_value());
  CHECK(std::abs(fix_branch(*e.peac_sum, theta) - theta) < 0.1);
}

TEST_CASE("curves are bit-identical across runs and thread counts") {
  ReplicationConfig cfg;
  cfg.n_datasets = 12;
  cfg.theta_grid = {0.9 * pi, pi};
  cfg.seed = 21;
  cfg.threads = 1;
  const auto a = bias_precision_curves(cfg);
  cfg.threads = 3;
  const auto b = bias_precision_curves(cfg);
  REQUIRE(a.size() == 6);
  REQUIRE(b.size() == 6);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].method == b[i].method);
    CHECK(std::memcmp(&a[i].theta_rec_mean, &b[i].theta_rec_mean, sizeof(double)) == 0);
    CHECK(std::memcmp(&a[i].delta_theta, &b[i].delta_theta, sizeof(double)) == 0);
    CHECK(a[i].n_failures == b[i].n_failures);
    CHECK(a[i].theta_bias == doctest::Approx(a[i].theta_rec_mean - a[i].theta_set));
    CHECK(a[i].n_used + a[i].n_failures == 12);
  }
  CHECK(a[0].method == Method::ellipse);
  CHECK(a[1].method == Method::peac_sum);
  CHECK(a[2].method == Method::peac_diff);
}

TEST_CASE("configuration checks") {
  ReplicationConfig cfg;
  CHECK_THROWS_AS(bias_precision_curves(cfg), Error);
  cfg.theta_grid = {1.0};
  cfg.n_datasets = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_method("peac_diff") == Method::peac_diff);
  CHECK_THROWS_AS(parse_method("nope"), Error);
}

TEST_CASE("parallel_for covers every index and forwards exceptions") {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 2, [](std::size_t i) {
                    if (i == 7) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}
