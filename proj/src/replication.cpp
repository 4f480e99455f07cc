#include "peac/replication.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "peac/ellipse_estimator.hpp"
#include "peac/error.hpp"
#include "peac/peac_estimator.hpp"
#include "peac/rng.hpp"

namespace peac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::array<Method, 3> kMethods = {Method::ellipse, Method::peac_sum, Method::peac_diff};

EstimateReport summarize(double theta_set, Method method, const std::vector<double>& values, int failures) {
  EstimateReport r;
  r.theta_set = theta_set;
  r.method = method;
  r.n_failures = failures;
  r.n_used = static_cast<int>(values.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (values.empty()) {
    r.theta_rec_mean = r.theta_bias = r.delta_theta = r.bias_se = r.delta_theta_se = nan;
    return r;
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size());
  r.theta_rec_mean = mean;
  r.theta_bias = mean - theta_set;
  r.delta_theta = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  r.bias_se = r.delta_theta / std::sqrt(n);
  r.delta_theta_se = values.size() > 1 ? r.delta_theta / std::sqrt(2.0 * (n - 1.0)) : nan;
  return r;
}

}  // namespace

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::ellipse: return "ellipse";
    case Method::peac_sum: return "peac_sum";
    case Method::peac_diff: return "peac_diff";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : kMethods)
    if (name == to_string(m)) return m;
  fail(Errc::config, "unknown method '" + name + "'");
}

void ReplicationConfig::validate() const {
  if (n_datasets < 1) fail(Errc::config, "n_datasets must be >= 1");
  if (n_points < 6) fail(Errc::config, "n_points must be >= 6");
  if (!std::isfinite(a0) || a0 < 0.0) fail(Errc::config, "a0 must be finite and >= 0");
  if (!std::isfinite(sigma) || sigma < 0.0) fail(Errc::config, "sigma must be finite and >= 0");
  if (!std::isfinite(mu)) fail(Errc::config, "mu must be finite");
  if (threads < 0) fail(Errc::config, "threads must be >= 0");
  for (double t : theta_grid)
    if (!std::isfinite(t)) fail(Errc::config, "theta_grid entries must be finite");
}

BootstrapResult bootstrap_indices(std::size_t n, int b, const IndexStatistic& statistic, std::uint64_t seed) {
  if (n == 0) fail(Errc::invalid_parameter, "bootstrap needs a non-empty sample");
  if (b < 2) fail(Errc::invalid_parameter, "bootstrap needs at least 2 resamples");

  Engine rng = make_stream(seed, {0xb007});
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> idx(n);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(b));
  BootstrapResult out;
  for (int k = 0; k < b; ++k) {
    if (k == 0) {
      for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    } else {
      for (auto& i : idx) i = pick(rng);
    }
    try {
      const double v = statistic(idx);
      if (std::isfinite(v)) {
        stats.push_back(v);
        continue;
      }
    } catch (const Error&) {
    }
    ++out.n_failures;
  }
  out.n_used = static_cast<int>(stats.size());
  if (stats.empty()) fail(Errc::fit_failure, "statistic failed on every bootstrap resample");
  double mean = 0.0;
  for (double v : stats) mean += v;
  mean /= static_cast<double>(stats.size());
  double ss = 0.0;
  for (double v : stats) ss += (v - mean) * (v - mean);
  out.mean = mean;
  out.std = stats.size() > 1 ? std::sqrt(ss / static_cast<double>(stats.size() - 1)) : 0.0;
  return out;
}

BootstrapResult bootstrap(std::span<const double> values, int b,
                          const std::function<double(std::span<const double>)>& statistic,
                          std::uint64_t seed) {
  std::vector<double> buffer(values.size());
  return bootstrap_indices(
      values.size(), b,
      [&](std::span<const std::size_t> idx) {
        for (std::size_t i = 0; i < idx.size(); ++i) buffer[i] = values[idx[i]];
        return statistic(buffer);
      },
      seed);
}

BivariateSample replicate_one(const ReplicationConfig& cfg, double theta, std::size_t dataset_index) {
  Engine rng = make_stream(cfg.seed, {dataset_index});
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::normal_distribution<double> baseline(cfg.mu, cfg.sigma);
  const auto n = static_cast<std::size_t>(cfg.n_points);
  BivariateSample s;
  s.plus.resize(n);
  s.minus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi0 = phase(rng);
    const double bp = cfg.sigma > 0.0 ? baseline(rng) : cfg.mu;
    const double bm = cfg.sigma > 0.0 ? baseline(rng) : cfg.mu;
    s.plus[i] = bp + cfg.a0 * std::cos(phi0 + 0.5 * theta);
    s.minus[i] = bm + cfg.a0 * std::cos(phi0 - 0.5 * theta);
  }
  return s;
}

std::vector<BivariateSample> replicate(const ReplicationConfig& cfg, double theta) {
  cfg.validate();
  std::vector<BivariateSample> out;
  out.reserve(static_cast<std::size_t>(cfg.n_datasets));
  for (int d = 0; d < cfg.n_datasets; ++d) out.push_back(replicate_one(cfg, theta, static_cast<std::size_t>(d)));
  return out;
}

std::optional<double> DatasetEstimate::get(Method m) const {
  switch (m) {
    case Method::ellipse: return ellipse;
    case Method::peac_sum: return peac_sum;
    case Method::peac_diff: return peac_diff;
  }
  return std::nullopt;
}

DatasetEstimate estimate_sample(const BivariateSample& sample) {
  DatasetEstimate e;
  try {
    e.ellipse = theta_from_conic(fit_conic(sample.minus, sample.plus));
  } catch (const Error&) {
  }
  try {
    const ChannelSuiteFit fit = fit_channel_suite(sample.plus, sample.minus);
    try {
      e.peac_sum = reconstruct_theta_two_state(fit.sum.params.amplitude, fit.a0);
    } catch (const Error&) {
    }
    try {
      e.peac_diff = reconstruct_theta_from_diff(fit.diff.params.amplitude, fit.a0);
    } catch (const Error&) {
    }
  } catch (const Error&) {
  }
  return e;
}

double fix_branch(double wrapped, double theta_set) {
  const double m_centre = std::round(theta_set / kTwoPi);
  const double tie = 1e-12 * std::max(1.0, std::abs(theta_set));
  double best = wrapped;
  double best_distance = std::numeric_limits<double>::infinity();
  // Candidates are visited in ascending order, so a tie keeps the smaller one.
  for (double m = m_centre - 1.0; m <= m_centre + 1.0; m += 1.0) {
    for (double candidate : {kTwoPi * m - wrapped, kTwoPi * m + wrapped}) {
      const double distance = std::abs(candidate - theta_set);
      if (distance < best_distance - tie) {
        best_distance = distance;
        best = candidate;
      }
    }
  }
  return best;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<EstimateReport> bias_precision_curves(const ReplicationConfig& cfg) {
  cfg.validate();
  if (cfg.theta_grid.empty()) fail(Errc::config, "theta_grid must not be empty");

  const std::size_t n_theta = cfg.theta_grid.size();
  const auto n_data = static_cast<std::size_t>(cfg.n_datasets);
  std::vector<DatasetEstimate> estimates(n_theta * n_data);
  parallel_for(estimates.size(), cfg.threads, [&](std::size_t k) {
    const std::size_t t = k / n_data, d = k % n_data;
    estimates[k] = estimate_sample(replicate_one(cfg, cfg.theta_grid[t], d));
  });

  std::vector<EstimateReport> reports;
  for (std::size_t t = 0; t < n_theta; ++t) {
    const double theta_set = cfg.theta_grid[t];
    for (Method m : kMethods) {
      std::vector<double> values;
      int failures = 0;
      for (std::size_t d = 0; d < n_data; ++d) {
        const auto v = estimates[t * n_data + d].get(m);
        if (v) {
          values.push_back(fix_branch(*v, theta_set));
        } else {
          ++failures;
        }
      }
      reports.push_back(summarize(theta_set, m, values, failures));
    }
  }
  return reports;
}

}  // namespace peac
