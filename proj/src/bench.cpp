#include "peac/bench.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "peac/ellipse_estimator.hpp"
#include "peac/error.hpp"
#include "peac/pdf.hpp"
#include "peac/rng.hpp"
#include "peac/signal_model.hpp"

namespace peac {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double start, double stop, int steps) {
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    v[static_cast<std::size_t>(i)] = steps == 1 ? start : start + (stop - start) * i / (steps - 1);
  return v;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json nullable(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

class Manifest {
 public:
  Manifest(std::string command, const RunOptions& opt)
      : command_(std::move(command)), out_dir_(opt.out_dir), started_(utc_now()), command_line_(opt.command_line) {
    if (out_dir_.empty()) fail(Errc::config, "an output directory is required");
    std::error_code ec;
    fs::create_directories(out_dir_, ec);
    if (ec) fail(Errc::io, "cannot create output directory '" + out_dir_ + "': " + ec.message());
  }

  std::string path(const std::string& name) {
    const std::string p = (fs::path(out_dir_) / name).string();
    outputs_.push_back(p);
    return p;
  }

  std::vector<std::string> finish(const Json& config, std::uint64_t seed) {
    const std::string manifest_path = (fs::path(out_dir_) / kName).string();
    Json m;
    m["command"] = command_;
    m["command_line"] = command_line_;
    m["code_version"] = PEAC_VERSION_STRING;
    m["seed"] = seed;
    m["config"] = config;
    m["started_utc"] = started_;
    m["finished_utc"] = utc_now();
    m["outputs"] = outputs_;
    write_json_file(manifest_path, m);
    std::vector<std::string> all = outputs_;
    all.push_back(manifest_path);
    return all;
  }

  static constexpr const char* kName = "manifest.json";

 private:
  std::string command_;
  std::string out_dir_;
  std::string started_;
  std::string command_line_;
  std::vector<std::string> outputs_;
};

Json load_config(const RunOptions& opt) {
  return opt.config_path.empty() ? Json::object() : read_config_file(opt.config_path);
}

PulseConfig pulse_from_json(const Json& j, PulseConfig base) {
  base.k_eff = get_number(j, "k_eff_rad_per_m", base.k_eff);
  base.tau = get_number(j, "tau_s", base.tau);
  base.gamma = get_number(j, "gamma", base.gamma);
  return base;
}

std::uint64_t series_seed(std::uint64_t seed, std::size_t index, std::uint64_t method) {
  return splitmix64(splitmix64(seed ^ (0x9e37ULL * (index + 1))) + method);
}

}  // namespace

SimulationConfig SimulationConfig::from_json(const Json& j) {
  check_keys(j,
             {"mode", "T_start_s", "T_stop_s", "T_steps", "theta_start_rad", "theta_stop_rad", "theta_steps",
              "tau_s", "a_ext_m_per_s2", "k_eff_rad_per_m", "gamma", "phases", "repetitions", "phase_stable",
              "a0", "lambda0", "delta_lambda", "sigma", "mu", "channels", "seed"},
             "simulate config");
  SimulationConfig c;
  if (j.contains("mode")) {
    const Json& m = j.at("mode");
    if (m == "T_scan") c.mode = Mode::T_scan;
    else if (m == "theta_scan") c.mode = Mode::theta_scan;
    else fail(Errc::config, "field 'mode' must be \"T_scan\" or \"theta_scan\"");
  }
  c.T_start_s = get_number(j, "T_start_s", c.T_start_s);
  c.T_stop_s = get_number(j, "T_stop_s", c.T_stop_s);
  c.T_steps = get_int(j, "T_steps", c.T_steps);
  c.theta_start_rad = get_number(j, "theta_start_rad", c.theta_start_rad);
  c.theta_stop_rad = get_number(j, "theta_stop_rad", c.theta_stop_rad);
  c.theta_steps = get_int(j, "theta_steps", c.theta_steps);
  c.pulse = pulse_from_json(j, c.pulse);
  c.pulse.a_ext = get_number(j, "a_ext_m_per_s2", c.pulse.a_ext);
  c.phases = get_int(j, "phases", c.phases);
  c.repetitions = get_int(j, "repetitions", c.repetitions);
  c.phase_stable = get_bool(j, "phase_stable", c.phase_stable);
  c.a0 = get_number(j, "a0", c.a0);
  c.lambda0 = get_number(j, "lambda0", c.lambda0);
  c.delta_lambda = get_number(j, "delta_lambda", c.delta_lambda);
  c.sigma = get_number(j, "sigma", c.sigma);
  c.mu = get_number(j, "mu", c.mu);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail(Errc::config, "field 'seed' must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("channels")) {
    const Json& list = j.at("channels");
    if (!list.is_array() || list.empty()) fail(Errc::config, "field 'channels' must be a non-empty array");
    c.channels.clear();
    for (const auto& name : list) {
      const auto ch = name.is_string() ? parse_channel(name.get<std::string>()) : std::nullopt;
      if (!ch) fail(Errc::config, "field 'channels' contains an unknown channel " + name.dump());
      c.channels.push_back(*ch);
    }
  }
  c.validate();
  return c;
}

Json SimulationConfig::to_json() const {
  Json channel_names = Json::array();
  for (Channel ch : channels) channel_names.push_back(std::string(peac::to_string(ch)));
  return Json{{"mode", mode == Mode::T_scan ? "T_scan" : "theta_scan"},
              {"T_start_s", T_start_s},
              {"T_stop_s", T_stop_s},
              {"T_steps", T_steps},
              {"theta_start_rad", theta_start_rad},
              {"theta_stop_rad", theta_stop_rad},
              {"theta_steps", theta_steps},
              {"tau_s", pulse.tau},
              {"a_ext_m_per_s2", pulse.a_ext},
              {"k_eff_rad_per_m", pulse.k_eff},
              {"gamma", pulse.gamma},
              {"phases", phases},
              {"repetitions", repetitions},
              {"phase_stable", phase_stable},
              {"a0", a0},
              {"lambda0", lambda0},
              {"delta_lambda", delta_lambda},
              {"sigma", sigma},
              {"mu", mu},
              {"channels", channel_names},
              {"seed", seed}};
}

void SimulationConfig::validate() const {
  if (phases < 1 || repetitions < 1) fail(Errc::config, "phases and repetitions must be >= 1");
  if (sigma < 0.0) fail(Errc::config, "sigma must be >= 0");
  if (a0 < 0.0) fail(Errc::config, "a0 must be >= 0");
  if (lambda0 < 0.0 || lambda0 > 1.0) fail(Errc::config, "lambda0 must lie in [0, 1]");
  if (std::abs(delta_lambda) > 1.0 - lambda0)
    fail(Errc::config, "|delta_lambda| must not exceed 1 - lambda0 (weights must be >= 0)");
  if (pulse.k_eff <= 0.0 || pulse.tau <= 0.0) fail(Errc::config, "k_eff_rad_per_m and tau_s must be > 0");
  if (mode == Mode::T_scan) {
    if (T_steps < 1) fail(Errc::config, "T_steps must be >= 1");
    if (T_start_s < 0.0 || T_stop_s < T_start_s) fail(Errc::config, "need 0 <= T_start_s <= T_stop_s");
  } else {
    if (theta_steps < 1) fail(Errc::config, "theta_steps must be >= 1");
    if (theta_start_rad < 0.0 || theta_stop_rad < theta_start_rad)
      fail(Errc::config, "need 0 <= theta_start_rad <= theta_stop_rad");
    if (pulse.a_ext <= 0.0) fail(Errc::config, "theta_scan needs a_ext_m_per_s2 > 0 to convert phases to T");
  }
}

std::vector<std::pair<double, double>> SimulationConfig::groups() const {
  std::vector<std::pair<double, double>> out;
  PulseConfig p = pulse;
  if (mode == Mode::T_scan) {
    for (double T : linspace(T_start_s, T_stop_s, T_steps)) {
      p.T = T;
      out.emplace_back(T, theta_of_T(p));
    }
  } else {
    for (double theta : linspace(theta_start_rad, theta_stop_rad, theta_steps))
      out.emplace_back(T_of_theta(p, theta), theta);
  }
  return out;
}

Dataset simulate(const SimulationConfig& cfg) {
  cfg.validate();
  const MixtureModel weights = MixtureModel::from_imbalance(cfg.lambda0, cfg.delta_lambda, cfg.a0, 0.0);
  const ScanConfig scan = ScanConfig::evenly_spaced(cfg.phases, cfg.repetitions, cfg.phase_stable, cfg.seed);
  const auto groups = cfg.groups();

  Dataset data;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto [T, theta] = groups[g];
    Engine rng = make_stream(cfg.seed, {g});
    std::normal_distribution<double> baseline(cfg.mu, cfg.sigma);
    auto draw = [&] { return cfg.sigma > 0.0 ? baseline(rng) : cfg.mu; };
    const std::size_t shots = scan.shots();
    std::vector<std::array<double, 6>> values(shots);
    for (std::size_t i = 0; i < shots; ++i) {
      const double phi0 = scan_phase(scan, i, rng);
      const double s_zero = draw() + cfg.a0 * std::cos(phi0);
      const double s_plus = draw() + cfg.a0 * std::cos(phi0 + 0.5 * theta);
      const double s_minus = draw() + cfg.a0 * std::cos(phi0 - 0.5 * theta);
      values[i] = {s_plus,
                   s_minus,
                   s_zero,
                   weights.lambda_0 * s_zero + weights.lambda_plus * s_plus + weights.lambda_minus * s_minus,
                   sum_signal(s_plus, s_minus),
                   diff_signal(s_plus, s_minus)};
    }
    for (Channel ch : cfg.channels) {
      for (std::size_t i = 0; i < shots; ++i) {
        Record r;
        r.T_s = T;
        r.scan_index = static_cast<int>(i % scan.phases.size());
        r.repetition = static_cast<int>(i / scan.phases.size());
        r.channel = ch;
        r.value = values[i][static_cast<std::size_t>(ch)];
        data.add(r);
      }
    }
  }
  return data;
}

EstimateMethod parse_estimate_method(const std::string& name) {
  if (name == "peac") return EstimateMethod::peac;
  if (name == "ellipse") return EstimateMethod::ellipse;
  if (name == "both") return EstimateMethod::both;
  fail(Errc::config, "method must be one of peac, ellipse, both (got '" + name + "')");
}

EstimateConfig EstimateConfig::from_json(const Json& j) {
  check_keys(j, {"k_eff_rad_per_m", "tau_s", "gamma", "a_ext_guess_m_per_s2", "method", "bootstrap", "seed", "threads"},
             "estimate config");
  EstimateConfig c;
  c.pulse = pulse_from_json(j, c.pulse);
  c.pulse.a_ext = get_number(j, "a_ext_guess_m_per_s2", c.pulse.a_ext);
  if (j.contains("method")) {
    if (!j.at("method").is_string()) fail(Errc::config, "field 'method' must be a string");
    c.method = parse_estimate_method(j.at("method").get<std::string>());
  }
  c.bootstrap = get_int(j, "bootstrap", c.bootstrap);
  c.threads = get_int(j, "threads", c.threads);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail(Errc::config, "field 'seed' must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (c.bootstrap < 0 || c.bootstrap == 1) fail(Errc::config, "bootstrap must be 0 or >= 2");
  if (c.pulse.k_eff <= 0.0 || c.pulse.tau <= 0.0) fail(Errc::config, "k_eff_rad_per_m and tau_s must be > 0");
  return c;
}

Json EstimateConfig::to_json() const {
  const char* m = method == EstimateMethod::peac ? "peac" : method == EstimateMethod::ellipse ? "ellipse" : "both";
  return Json{{"k_eff_rad_per_m", pulse.k_eff}, {"tau_s", pulse.tau},   {"gamma", pulse.gamma},
              {"a_ext_guess_m_per_s2", pulse.a_ext}, {"method", m},     {"bootstrap", bootstrap},
              {"seed", seed},                        {"threads", threads}};
}

EstimateResult estimate_dataset(const Dataset& data, const EstimateConfig& cfg) {
  if (data.empty()) fail(Errc::data, "dataset is empty");
  const auto problems = data.violations();
  if (!problems.empty()) {
    std::string msg = "dataset violates its schema:";
    for (std::size_t i = 0; i < problems.size() && i < 20; ++i) msg += "\n  " + problems[i];
    if (problems.size() > 20) msg += "\n  ... " + std::to_string(problems.size() - 20) + " more";
    fail(Errc::data, msg);
  }

  const bool want_peac = cfg.method != EstimateMethod::ellipse;
  const bool want_ellipse = cfg.method != EstimateMethod::peac;
  const auto times = data.times();
  bool any_pair = false, any_all = false;
  for (double T : times) {
    const bool pair = data.has_channel(T, Channel::plus) && data.has_channel(T, Channel::minus);
    any_pair = any_pair || pair;
    any_all = any_all || data.has_channel(T, Channel::all);
    if (want_ellipse && !pair)
      fail(Errc::incomplete_dataset,
           "ellipse fitting needs plus and minus channels; missing at T_s=" + std::to_string(T));
  }
  if (want_peac && !any_pair && !any_all)
    fail(Errc::incomplete_dataset, "PEAC needs plus/minus channels or the all channel");

  EstimateResult result;
  result.fits.resize(times.size());
  result.peac.resize(times.size());
  result.ellipse.resize(times.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();

  parallel_for(times.size(), cfg.threads, [&](std::size_t t) {
    const double T = times[t];
    TimeFits& fits = result.fits[t];
    fits.T_s = T;
    SeriesPoint& pp = result.peac[t];
    SeriesPoint& ep = result.ellipse[t];
    pp.T_s = ep.T_s = T;
    pp.theta_se = ep.theta_se = nan;

    if (want_peac && data.has_channel(T, Channel::all)) {
      try {
        fits.all = fit_values(data.values(T, Channel::all));
      } catch (const Error& e) {
        fits.errors.push_back(std::string("all: ") + e.what());
      }
    }
    if (!(data.has_channel(T, Channel::plus) && data.has_channel(T, Channel::minus))) {
      pp.error = ep.error = "plus/minus channels absent";
      return;
    }
    const auto plus = data.values(T, Channel::plus);
    const auto minus = data.values(T, Channel::minus);

    auto resample = [&](SeriesPoint& point, std::uint64_t tag, auto&& statistic) {
      if (cfg.bootstrap < 2) return;
      std::vector<double> bp(plus.size()), bm(minus.size());
      try {
        const BootstrapResult b = bootstrap_indices(
            plus.size(), cfg.bootstrap,
            [&](std::span<const std::size_t> idx) {
              for (std::size_t i = 0; i < idx.size(); ++i) {
                bp[i] = plus[idx[i]];
                bm[i] = minus[idx[i]];
              }
              return statistic(bp, bm);
            },
            series_seed(cfg.seed, t, tag));
        point.theta_se = b.std;
        point.bootstrap_failures = b.n_failures;
      } catch (const Error& e) {
        point.bootstrap_failures = cfg.bootstrap;
      }
    };

    if (want_peac) {
      try {
        fits.suite = fit_channel_suite(plus, minus);
        pp.theta_wrapped = reconstruct_theta_favorable(*fits.suite);
        resample(pp, 1, [](const std::vector<double>& p, const std::vector<double>& m) {
          return reconstruct_theta_favorable(fit_channel_suite(p, m));
        });
      } catch (const Error& e) {
        pp.error = e.what();
      }
    }
    if (want_ellipse) {
      try {
        fits.conic = fit_conic(minus, plus);
        ep.theta_wrapped = theta_from_conic(*fits.conic);
        resample(ep, 2, [](const std::vector<double>& p, const std::vector<double>& m) {
          return theta_from_conic(fit_conic(m, p));
        });
      } catch (const Error& e) {
        ep.error = e.what();
      }
    }
  });

  auto finish_series = [&](std::vector<SeriesPoint>& series, const char* label) -> std::optional<double> {
    std::vector<double> wrapped, T_ok;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (series[i].theta_wrapped) {
        wrapped.push_back(*series[i].theta_wrapped);
        T_ok.push_back(series[i].T_s);
        index.push_back(i);
      } else if (!series[i].error.empty()) {
        result.warnings.push_back(std::string(label) + " at T_s=" + std::to_string(series[i].T_s) + ": " +
                                  series[i].error);
      }
    }
    const auto unwrapped = unwrap(wrapped);
    for (std::size_t k = 0; k < index.size(); ++k) series[index[k]].theta_unwrapped = unwrapped[k];
    for (std::size_t i = 0; i < series.size(); ++i)
      if (!series[i].theta_wrapped) series[i].theta_unwrapped = nan;
    if (T_ok.size() < 2) return std::nullopt;
    try {
      return fit_acceleration(T_ok, unwrapped, cfg.pulse);
    } catch (const Error& e) {
      result.warnings.push_back(std::string(label) + " acceleration fit: " + e.what());
      return std::nullopt;
    }
  };

  if (want_peac && any_pair) result.a_ext_pointwise = finish_series(result.peac, "peac");
  if (want_ellipse) result.a_ext_ellipse = finish_series(result.ellipse, "ellipse");
  if (!want_peac || !any_pair) result.peac.clear();
  if (!want_ellipse) result.ellipse.clear();

  if (want_peac) {
    std::vector<CollapsePoint> curve;
    for (const auto& f : result.fits)
      if (f.all) curve.push_back({f.T_s, f.all->params.amplitude});
    if (curve.size() >= 4) {
      try {
        result.collapse = fit_collapse_curve(curve, cfg.pulse);
      } catch (const FitFailure& e) {
        result.warnings.push_back(std::string("collapse-curve fit: ") + e.what());
      } catch (const Error& e) {
        result.warnings.push_back(std::string("collapse-curve fit: ") + e.what());
      }
    } else if (!curve.empty()) {
      result.warnings.push_back("collapse-curve fit skipped: fewer than 4 interrogation times with an all channel");
    }
  }
  return result;
}

Json to_json(const EstimateResult& r) {
  Json fits = Json::array();
  for (const auto& f : r.fits) {
    Json j{{"T_s", f.T_s}};
    if (f.suite) {
      j["plus"] = to_json(f.suite->plus);
      j["minus"] = to_json(f.suite->minus);
      j["sum"] = to_json(f.suite->sum);
      j["diff"] = to_json(f.suite->diff);
      j["a0"] = f.suite->a0;
    }
    if (f.all) j["all"] = to_json(*f.all);
    if (f.conic) j["conic"] = to_json(*f.conic);
    if (!f.errors.empty()) j["errors"] = f.errors;
    fits.push_back(j);
  }
  auto series = [](const std::vector<SeriesPoint>& s) {
    Json a = Json::array();
    for (const auto& p : s) {
      Json j{{"T_s", p.T_s},
             {"theta_wrapped", nullable(p.theta_wrapped)},
             {"theta_unwrapped", nullable(p.theta_unwrapped)},
             {"theta_se", nullable(p.theta_se)},
             {"bootstrap_failures", p.bootstrap_failures}};
      if (!p.error.empty()) j["error"] = p.error;
      a.push_back(j);
    }
    return a;
  };
  Json j;
  j["fits"] = fits;
  j["peac_series"] = series(r.peac);
  j["ellipse_series"] = series(r.ellipse);
  j["collapse_fit"] = r.collapse ? to_json(*r.collapse) : Json(nullptr);
  j["a_ext_pointwise_m_per_s2"] = nullable(r.a_ext_pointwise);
  j["a_ext_ellipse_m_per_s2"] = nullable(r.a_ext_ellipse);
  j["warnings"] = r.warnings;
  return j;
}

ReplicationConfig replication_from_json(const Json& j) {
  check_keys(j,
             {"n_datasets", "n_points", "a0", "sigma", "mu", "theta_grid_rad", "theta_start_rad", "theta_stop_rad",
              "theta_steps", "seed", "threads"},
             "benchmark config");
  ReplicationConfig c;
  c.n_datasets = get_int(j, "n_datasets", c.n_datasets);
  c.n_points = get_int(j, "n_points", c.n_points);
  c.a0 = get_number(j, "a0", c.a0);
  c.sigma = get_number(j, "sigma", c.sigma);
  c.mu = get_number(j, "mu", c.mu);
  c.threads = get_int(j, "threads", c.threads);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) fail(Errc::config, "field 'seed' must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("theta_grid_rad")) {
    const Json& g = j.at("theta_grid_rad");
    if (!g.is_array() || g.empty()) fail(Errc::config, "field 'theta_grid_rad' must be a non-empty array");
    for (const auto& v : g) {
      if (!v.is_number()) fail(Errc::config, "field 'theta_grid_rad' must contain numbers");
      c.theta_grid.push_back(v.get<double>());
    }
  } else {
    const double start = get_number(j, "theta_start_rad", 0.0);
    const double stop = get_number(j, "theta_stop_rad", 2.0 * kPi);
    const int steps = get_int(j, "theta_steps", 41);
    if (steps < 1) fail(Errc::config, "theta_steps must be >= 1");
    c.theta_grid = linspace(start, stop, steps);
  }
  c.validate();
  return c;
}

Json to_json(const ReplicationConfig& c) {
  return Json{{"n_datasets", c.n_datasets}, {"n_points", c.n_points},        {"a0", c.a0},
              {"sigma", c.sigma},           {"mu", c.mu},                    {"theta_grid_rad", c.theta_grid},
              {"seed", c.seed},             {"threads", c.threads}};
}

std::optional<EstimateReport> find_report(const std::vector<EstimateReport>& reports, Method method,
                                          double theta_set) {
  for (const auto& r : reports)
    if (r.method == method && std::abs(r.theta_set - theta_set) <= 1e-9) return r;
  return std::nullopt;
}

BenchmarkSummary summarize_benchmark(const std::vector<EstimateReport>& reports, double threshold) {
  BenchmarkSummary s;
  s.peak_merge_threshold = threshold;
  auto reduction = [&](Method m, double theta) -> std::optional<double> {
    const auto peac = find_report(reports, m, theta);
    const auto ell = find_report(reports, Method::ellipse, theta);
    if (!peac || !ell || !std::isfinite(peac->theta_bias) || !std::isfinite(ell->theta_bias) ||
        ell->theta_bias == 0.0)
      return std::nullopt;
    return 1.0 - std::abs(peac->theta_bias) / std::abs(ell->theta_bias);
  };
  s.bias_reduction_pi = reduction(Method::peac_sum, kPi);
  s.bias_reduction_two_pi = reduction(Method::peac_diff, 2.0 * kPi);
  return s;
}

void write_reports_csv(const std::string& path, const std::vector<EstimateReport>& reports) {
  std::ofstream out(path);
  if (!out) fail(Errc::io, "cannot write '" + path + "'");
  out << "theta_set,method,theta_rec_mean,theta_bias,delta_theta,n_failures\n";
  char line[256];
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%.17g,%s,%.17g,%.17g,%.17g,%d\n", r.theta_set, to_string(r.method),
                  r.theta_rec_mean, r.theta_bias, r.delta_theta, r.n_failures);
    out << line;
  }
  if (!out) fail(Errc::io, "write failed for '" + path + "'");
}

GammaFitConfig GammaFitConfig::from_json(const Json& j) {
  check_keys(j, {"tau_s", "T_start_s", "T_stop_s", "T_steps"}, "gamma-fit config");
  GammaFitConfig c;
  c.tau_s = get_number(j, "tau_s", c.tau_s);
  c.T_start_s = get_number(j, "T_start_s", c.T_start_s);
  c.T_stop_s = get_number(j, "T_stop_s", c.T_stop_s);
  c.T_steps = get_int(j, "T_steps", c.T_steps);
  if (c.tau_s <= 0.0) fail(Errc::config, "tau_s must be > 0");
  if (c.T_steps < 2) fail(Errc::config, "T_steps must be >= 2");
  if (!(c.T_start_s > c.tau_s) || c.T_stop_s < c.T_start_s)
    fail(Errc::config, "need tau_s < T_start_s <= T_stop_s");
  return c;
}

Json GammaFitConfig::to_json() const {
  return Json{{"tau_s", tau_s}, {"T_start_s", T_start_s}, {"T_stop_s", T_stop_s}, {"T_steps", T_steps}};
}

GammaFitResult run_gamma_fit(const GammaFitConfig& cfg) {
  GammaFitResult r;
  r.T_s = linspace(cfg.T_start_s, cfg.T_stop_s, cfg.T_steps);
  PulseConfig base;
  base.tau = cfg.tau_s;
  base.a_ext = 1.0;
  r.gamma = fit_gamma(cfg.tau_s, r.T_s, base);
  base.gamma = r.gamma;
  for (double T : r.T_s) {
    base.T = T;
    const double integral = finite_pulse_phase(base);
    r.theta_integral.push_back(integral);
    r.max_relative_deviation = std::max(r.max_relative_deviation, std::abs(theta_of_T(base) / integral - 1.0));
  }
  return r;
}

std::vector<std::string> run_simulate(const RunOptions& opt) {
  SimulationConfig cfg = SimulationConfig::from_json(load_config(opt));
  if (opt.seed) cfg.seed = *opt.seed;
  Manifest manifest("simulate", opt);
  const Dataset data = simulate(cfg);
  data.write_csv(manifest.path("dataset.csv"));

  Json groups = Json::array();
  for (const auto& [T, theta] : cfg.groups()) groups.push_back({{"T_s", T}, {"theta_rad", theta}});
  write_json_file(manifest.path("groups.json"), Json{{"manifest", Manifest::kName}, {"groups", groups}});
  return manifest.finish(cfg.to_json(), cfg.seed);
}

std::vector<std::string> run_estimate(const RunOptions& opt) {
  EstimateConfig cfg = EstimateConfig::from_json(load_config(opt));
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.method) cfg.method = parse_estimate_method(*opt.method);
  if (opt.threads) cfg.threads = *opt.threads;
  if (opt.bootstrap) {
    if (*opt.bootstrap < 0 || *opt.bootstrap == 1) fail(Errc::config, "bootstrap must be 0 or >= 2");
    cfg.bootstrap = *opt.bootstrap;
  }
  if (opt.data_path.empty()) fail(Errc::config, "estimate needs a dataset path");
  const Dataset data = Dataset::read_csv(opt.data_path);
  const EstimateResult result = estimate_dataset(data, cfg);

  Manifest manifest("estimate", opt);
  {
    const std::string path = manifest.path("theta_series.csv");
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write '" + path + "'");
    out << "T_s,method,theta_wrapped,theta_unwrapped,theta_se,bootstrap_failures\n";
    char line[256];
    auto emit = [&](const std::vector<SeriesPoint>& s, const char* method) {
      for (const auto& p : s) {
        std::snprintf(line, sizeof line, "%.17g,%s,%.17g,%.17g,%.17g,%d\n", p.T_s, method,
                      p.theta_wrapped.value_or(std::numeric_limits<double>::quiet_NaN()), p.theta_unwrapped,
                      p.theta_se, p.bootstrap_failures);
        out << line;
      }
    };
    emit(result.peac, "peac");
    emit(result.ellipse, "ellipse");
    if (!out) fail(Errc::io, "write failed for '" + path + "'");
  }
  Json j = to_json(result);
  j["manifest"] = Manifest::kName;
  write_json_file(manifest.path("estimate.json"), j);
  Json snapshot = cfg.to_json();
  snapshot["data_path"] = opt.data_path;
  return manifest.finish(snapshot, cfg.seed);
}

std::vector<std::string> run_benchmark(const RunOptions& opt) {
  ReplicationConfig cfg = replication_from_json(load_config(opt));
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  Manifest manifest("benchmark", opt);
  const auto reports = bias_precision_curves(cfg);
  const double threshold = peak_merge_threshold();
  const BenchmarkSummary s = summarize_benchmark(reports, threshold);

  write_reports_csv(manifest.path("benchmark.csv"), reports);
  Json rows = Json::array();
  for (const auto& r : reports) rows.push_back(to_json(r));
  write_json_file(manifest.path("benchmark.json"), Json{{"manifest", Manifest::kName}, {"reports", rows}});
  int failures = 0;
  for (const auto& r : reports) failures += r.n_failures;
  write_json_file(manifest.path("summary.json"),
                  Json{{"manifest", Manifest::kName},
                       {"bias_reduction_pi", nullable(s.bias_reduction_pi)},
                       {"bias_reduction_two_pi", nullable(s.bias_reduction_two_pi)},
                       {"peak_merge_threshold", s.peak_merge_threshold},
                       {"n_datasets", cfg.n_datasets},
                       {"total_failures", failures}});
  return manifest.finish(to_json(cfg), cfg.seed);
}

std::vector<std::string> run_gamma_fit(const RunOptions& opt) {
  const GammaFitConfig cfg = GammaFitConfig::from_json(load_config(opt));
  Manifest manifest("gamma-fit", opt);
  const GammaFitResult r = run_gamma_fit(cfg);
  write_json_file(manifest.path("gamma.json"), Json{{"manifest", Manifest::kName},
                                                    {"gamma", r.gamma},
                                                    {"tau_s", cfg.tau_s},
                                                    {"max_relative_deviation", r.max_relative_deviation},
                                                    {"T_s", r.T_s},
                                                    {"theta_integral_per_unit_a_ext", r.theta_integral}});
  return manifest.finish(cfg.to_json(), 0);
}

}  // namespace peac
