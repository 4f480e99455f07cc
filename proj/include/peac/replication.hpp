#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace peac {

enum class Method { ellipse, peac_sum, peac_diff };

const char* to_string(Method m) noexcept;
Method parse_method(const std::string& name);

struct ReplicationConfig {
  int n_datasets = 1000;
  int n_points = 300;
  double a0 = 0.824;
  double sigma = 0.063;
  double mu = 0.0;
  std::vector<double> theta_grid;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;

  void validate() const;
};

struct EstimateReport {
  double theta_set = 0.0;
  Method method = Method::ellipse;
  double theta_rec_mean = 0.0;
  double theta_bias = 0.0;   // theta_rec_mean - theta_set
  double delta_theta = 0.0;  // sample standard deviation of theta_rec
  int n_failures = 0;
  int n_used = 0;
  double bias_se = 0.0;         // delta_theta / sqrt(n_used)
  double delta_theta_se = 0.0;  // delta_theta / sqrt(2 (n_used - 1))
};

struct BootstrapResult {
  double mean = 0.0;
  double std = 0.0;  // ddof = 1
  int n_used = 0;
  int n_failures = 0;
};

/// Statistic evaluated on a resample given by indices into the original data.
using IndexStatistic = std::function<double(std::span<const std::size_t>)>;

/// b index resamples of size n drawn with replacement; the identity resample is
/// the first of the b sets. Resamples whose statistic throws peac::Error or
/// returns a non-finite value are counted and excluded.
BootstrapResult bootstrap_indices(std::size_t n, int b, const IndexStatistic& statistic,
                                  std::uint64_t seed);

BootstrapResult bootstrap(std::span<const double> values, int b,
                          const std::function<double(std::span<const double>)>& statistic,
                          std::uint64_t seed);

struct BivariateSample {
  std::vector<double> plus;
  std::vector<double> minus;
};

/// Dataset `dataset_index` at phase theta: S+- = B+- + a0 cos(phi0 +- theta/2) with
/// phi0 uniform and independent Normal(mu, sigma^2) baselines. The random stream
/// depends only on (seed, dataset_index), so the same draws are reused across theta.
BivariateSample replicate_one(const ReplicationConfig& cfg, double theta, std::size_t dataset_index);

/// All n_datasets samples for one phase.
std::vector<BivariateSample> replicate(const ReplicationConfig& cfg, double theta);

struct DatasetEstimate {
  /// Wrapped phases in [0, pi]; nullopt when the estimator failed on this dataset.
  std::optional<double> ellipse;
  std::optional<double> peac_sum;
  std::optional<double> peac_diff;

  std::optional<double> get(Method m) const;
};

/// Runs the ellipse fit and the PEAC channel suite on one bivariate sample.
DatasetEstimate estimate_sample(const BivariateSample& sample);

/// Maps a wrapped phase onto the branch 2 pi m +- wrapped closest to theta_set,
/// preferring the smaller candidate on ties. Benchmark use only: it needs the truth.
double fix_branch(double wrapped, double theta_set);

/// Bias and precision per (theta_set, method), ordered by grid index then method
/// (ellipse, peac_sum, peac_diff). Deterministic for any thread count.
std::vector<EstimateReport> bias_precision_curves(const ReplicationConfig& cfg);

/// Order-preserving parallel loop over [0, count).
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace peac
