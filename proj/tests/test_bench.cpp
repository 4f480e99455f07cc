#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "peac/bench.hpp"
#include "peac/error.hpp"

using namespace peac;
using std::numbers::pi;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::io;
}

}  // namespace

TEST_CASE("default simulation covers the standard T scan") {
  const SimulationConfig cfg;
  const Dataset d = simulate(cfg);
  const auto times = d.times();
  REQUIRE(times.size() == 21);
  CHECK(times.front() == doctest::Approx(1e-3));
  CHECK(times.back() == doctest::Approx(3e-3));
  CHECK(times[1] - times[0] == doctest::Approx(1e-4));
  for (double T : times)
    for (Channel c : cfg.channels) CHECK(d.values(T, c).size() == 300);
  CHECK(d.size() == 21 * 300 * 6);
  CHECK(d.violations().empty());
}

TEST_CASE("theta-grid simulation emits one group per phase") {
  SimulationConfig cfg;
  cfg.mode = SimulationConfig::Mode::theta_scan;
  cfg.theta_steps = 101;
  cfg.channels = {Channel::plus, Channel::minus};
  const Dataset d = simulate(cfg);
  CHECK(d.times().size() == 101);
  const auto groups = cfg.groups();
  PulseConfig p = cfg.pulse;
  p.T = groups[50].first;
  CHECK(theta_of_T(p) == doctest::Approx(groups[50].second).epsilon(1e-10));
}

TEST_CASE("noiseless simulation is deterministic and exact") {
  SimulationConfig cfg;
  cfg.sigma = 0.0;
  cfg.T_steps = 3;
  cfg.phase_stable = true;
  const Dataset a = simulate(cfg), b = simulate(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.records()[i].value == b.records()[i].value);
  const auto zero = a.values(1e-3, Channel::zero);
  CHECK(zero[0] == doctest::Approx(cfg.a0));
}

TEST_CASE("simulation config parsing") {
  const Json j = parse_config_text(R"({"T_steps": 5, "sigma": 0.01, "channels": ["plus", "minus"], "seed": 4})", "t");
  const SimulationConfig c = SimulationConfig::from_json(j);
  CHECK(c.T_steps == 5);
  CHECK(c.channels.size() == 2);
  CHECK(c.seed == 4);
  CHECK(SimulationConfig::from_json(c.to_json()).to_json() == c.to_json());

  CHECK(code_of([] { parse_config_text("{\n  \"T_steps\": 5,\n  oops\n}", "cfg.json"); }) == Errc::config);
  try {
    parse_config_text("{\n  \"T_steps\": 5,\n  oops\n}", "cfg.json");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("cfg.json:3:") != std::string::npos);
  }
  CHECK(code_of([] { SimulationConfig::from_json(Json{{"T_stpes", 3}}); }) == Errc::config);
  CHECK(code_of([] { SimulationConfig::from_json(Json{{"sigma", "big"}}); }) == Errc::config);
  CHECK(code_of([] { SimulationConfig::from_json(Json{{"lambda0", 0.9}, {"delta_lambda", 0.5}}); }) == Errc::config);
  CHECK(code_of([] { SimulationConfig::from_json(Json{{"channels", {"up"}}}); }) == Errc::config);
}

TEST_CASE("end-to-end estimate recovers the configured acceleration") {
  const Dataset d = simulate(SimulationConfig{});
  EstimateConfig cfg;
  cfg.bootstrap = 0;
  const EstimateResult r = estimate_dataset(d, cfg);
  REQUIRE(r.collapse.has_value());
  CHECK(r.collapse->a_ext == doctest::Approx(0.0322).epsilon(0.01));
  REQUIRE(r.a_ext_pointwise.has_value());
  CHECK(*r.a_ext_pointwise == doctest::Approx(0.0322).epsilon(0.01));
  CHECK(r.peac.size() == 21);
  CHECK(r.ellipse.size() == 21);
  for (std::size_t i = 1; i < r.peac.size(); ++i) CHECK(r.peac[i].theta_unwrapped > r.peac[i - 1].theta_unwrapped);

  const Json j = to_json(r);
  for (const char* key : {"a_ext_m_per_s2", "lambda0", "delta_lambda", "a0", "converged", "residual"})
    CHECK(j["collapse_fit"].contains(key));
  for (const char* key : {"amplitude", "mean", "sigma", "converged", "residual"}) CHECK(j["fits"][0]["plus"].contains(key));
  for (const char* key : {"c_plus_sq", "c_minus_sq", "c0", "d_plus", "d_minus", "d0", "is_ellipse"})
    CHECK(j["fits"][0]["conic"].contains(key));
}

TEST_CASE("acceleration recovery holds across seeds for every route") {
  for (std::uint64_t seed = 2; seed <= 7; ++seed) {
    SimulationConfig sim;
    sim.seed = seed;
    EstimateConfig cfg;
    cfg.bootstrap = 0;
    const EstimateResult r = estimate_dataset(simulate(sim), cfg);
    CAPTURE(seed);
    REQUIRE(r.collapse.has_value());
    CHECK(r.collapse->a_ext == doctest::Approx(0.0322).epsilon(0.01));
    CHECK(r.a_ext_pointwise.value_or(0.0) == doctest::Approx(0.0322).epsilon(0.01));
    CHECK(r.a_ext_ellipse.value_or(0.0) == doctest::Approx(0.0322).epsilon(0.02));
  }
}

TEST_CASE("estimate with bootstrap reports uncertainties") {
  SimulationConfig sim;
  sim.T_steps = 4;
  sim.channels = {Channel::plus, Channel::minus};
  EstimateConfig cfg;
  cfg.bootstrap = 20;
  const EstimateResult r = estimate_dataset(simulate(sim), cfg);
  for (const auto& p : r.peac) {
    CHECK(std::isfinite(p.theta_se));
    CHECK(p.theta_se > 0.0);
  }
  CHECK_FALSE(r.collapse.has_value());
}

TEST_CASE("estimate reports missing channels and schema violations as data errors") {
  SimulationConfig sim;
  sim.T_steps = 2;
  sim.channels = {Channel::plus, Channel::all};
  EstimateConfig cfg;
  cfg.bootstrap = 0;
  cfg.method = EstimateMethod::ellipse;
  CHECK(code_of([&] { estimate_dataset(simulate(sim), cfg); }) == Errc::incomplete_dataset);

  Dataset broken = simulate(sim);
  broken.add({1e-3, 99, 0, Channel::plus, 0.0});
  cfg.method = EstimateMethod::peac;
  CHECK(code_of([&] { estimate_dataset(broken, cfg); }) == Errc::data);
  CHECK(code_of([&] { estimate_dataset(Dataset{}, cfg); }) == Errc::data);
}

TEST_CASE("benchmark summary and config") {
  const ReplicationConfig c = replication_from_json(Json{{"n_datasets", 5}, {"theta_steps", 3}});
  REQUIRE(c.theta_grid.size() == 3);
  CHECK(c.theta_grid[1] == doctest::Approx(pi));
  CHECK(c.n_points == 300);
  CHECK(c.a0 == 0.824);
  CHECK(c.sigma == 0.063);
  CHECK(code_of([] { replication_from_json(Json{{"n_datasets", 0}}); }) == Errc::config);

  std::vector<EstimateReport> reports;
  reports.push_back({pi, Method::ellipse, pi - 0.2, -0.2, 0.01, 0, 10, 0.0, 0.0});
  reports.push_back({pi, Method::peac_sum, pi - 0.04, -0.04, 0.05, 0, 10, 0.0, 0.0});
  const BenchmarkSummary s = summarize_benchmark(reports, 1.7776);
  REQUIRE(s.bias_reduction_pi.has_value());
  CHECK(*s.bias_reduction_pi == doctest::Approx(0.8));
  CHECK_FALSE(s.bias_reduction_two_pi.has_value());
}

TEST_CASE("gamma-fit command result") {
  const GammaFitResult r = run_gamma_fit(GammaFitConfig{});
  CHECK(r.gamma == doctest::Approx(0.1486).epsilon(0.0005 / 0.1486));
  CHECK(r.max_relative_deviation < 2e-3);
  CHECK(r.T_s.size() == 21);
  CHECK(code_of([] { GammaFitConfig::from_json(Json{{"T_steps", 1}}); }) == Errc::config);
}
