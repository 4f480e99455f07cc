#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "peac/collapse_fit.hpp"
#include "peac/dataset.hpp"
#include "peac/json_io.hpp"
#include "peac/peac_estimator.hpp"
#include "peac/pulse_physics.hpp"
#include "peac/replication.hpp"

namespace peac {

struct SimulationConfig {
  enum class Mode { T_scan, theta_scan };
  Mode mode = Mode::T_scan;
  double T_start_s = 1e-3;
  double T_stop_s = 3e-3;
  int T_steps = 21;
  double theta_start_rad = 0.0;
  double theta_stop_rad = 2.0 * std::numbers::pi;
  int theta_steps = 101;
  PulseConfig pulse{.a_ext = 0.0322};
  int phases = 20;
  int repetitions = 15;
  bool phase_stable = false;
  double a0 = 0.79;
  double lambda0 = 0.42;
  double delta_lambda = 0.18;
  double sigma = 0.063;  // per-state baseline noise
  double mu = 0.0;
  std::vector<Channel> channels = {Channel::plus, Channel::minus, Channel::zero,
                                   Channel::all,  Channel::sum,   Channel::diff};
  std::uint64_t seed = 1;

  static SimulationConfig from_json(const Json& j);
  Json to_json() const;
  void validate() const;
  /// Interrogation time and differential phase of every dataset group.
  std::vector<std::pair<double, double>> groups() const;
};

/// Three correlated state signals S_mf = B_mf + a0 cos(phi0 + mf theta/2) with
/// independent Normal(mu, sigma^2) baselines, their weighted mixture S_all with
/// weights summing to 1, and the sum/diff projections of S_plus and S_minus.
Dataset simulate(const SimulationConfig& cfg);

enum class EstimateMethod { peac, ellipse, both };
EstimateMethod parse_estimate_method(const std::string& name);

struct EstimateConfig {
  PulseConfig pulse{.a_ext = 0.03};  // a_ext seeds the collapse-curve scan
  EstimateMethod method = EstimateMethod::both;
  int bootstrap = 100;  // 0 disables resampling
  std::uint64_t seed = 1;
  int threads = 0;

  static EstimateConfig from_json(const Json& j);
  Json to_json() const;
};

struct SeriesPoint {
  double T_s = 0.0;
  std::optional<double> theta_wrapped;
  double theta_unwrapped = 0.0;
  double theta_se = 0.0;  // bootstrap standard deviation, NaN without resampling
  int bootstrap_failures = 0;
  std::string error;
};

struct TimeFits {
  double T_s = 0.0;
  std::optional<ChannelSuiteFit> suite;
  std::optional<PdfFit> all;
  std::optional<ConicCoefficients> conic;
  std::vector<std::string> errors;
};

struct EstimateResult {
  std::vector<TimeFits> fits;
  std::vector<SeriesPoint> peac;
  std::vector<SeriesPoint> ellipse;
  std::optional<CollapseFitResult> collapse;
  std::optional<double> a_ext_pointwise;
  std::optional<double> a_ext_ellipse;
  std::vector<std::string> warnings;
};

/// Fits every interrogation time, reconstructs and unwraps theta(T), and
/// extracts a_ext from the collapse curve and from the pointwise series.
/// Throws Errc::data for schema violations and Errc::incomplete_dataset when a
/// channel needed by the method is missing.
EstimateResult estimate_dataset(const Dataset& data, const EstimateConfig& cfg);

Json to_json(const EstimateResult& r);

ReplicationConfig replication_from_json(const Json& j);
Json to_json(const ReplicationConfig& cfg);

struct BenchmarkSummary {
  std::optional<double> bias_reduction_pi;      // 1 - |bias peac_sum| / |bias ellipse| at theta = pi
  std::optional<double> bias_reduction_two_pi;  // same with peac_diff at theta = 2 pi
  double peak_merge_threshold = 0.0;
};

BenchmarkSummary summarize_benchmark(const std::vector<EstimateReport>& reports, double threshold);
/// Report for (method, theta_set) within 1e-9 rad, if present.
std::optional<EstimateReport> find_report(const std::vector<EstimateReport>& reports, Method method,
                                          double theta_set);
void write_reports_csv(const std::string& path, const std::vector<EstimateReport>& reports);

struct GammaFitConfig {
  double tau_s = kDefaultTau;
  double T_start_s = 1e-3;
  double T_stop_s = 3e-3;
  int T_steps = 21;

  static GammaFitConfig from_json(const Json& j);
  Json to_json() const;
};

struct GammaFitResult {
  double gamma = 0.0;
  double max_relative_deviation = 0.0;  // closed form with fitted gamma vs integral
  std::vector<double> T_s;
  std::vector<double> theta_integral;
};

GammaFitResult run_gamma_fit(const GammaFitConfig& cfg);

/// Options shared by the file-level commands.
struct RunOptions {
  std::string config_path;  // empty: defaults
  std::string data_path;    // estimate only
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
  std::optional<int> threads;
  std::optional<int> bootstrap;
  std::string command_line;  // recorded in the manifest
};

/// Each command writes its outputs plus manifest.json into out_dir and returns
/// the paths written.
std::vector<std::string> run_simulate(const RunOptions& opt);
std::vector<std::string> run_estimate(const RunOptions& opt);
std::vector<std::string> run_benchmark(const RunOptions& opt);
std::vector<std::string> run_gamma_fit(const RunOptions& opt);

}  // namespace peac
