#include "peac/peac.h"

#include <exception>
#include <new>
#include <string>

#include "peac/bench.hpp"
#include "peac/dataset.hpp"
#include "peac/ellipse_estimator.hpp"
#include "peac/error.hpp"
#include "peac/pdf.hpp"
#include "peac/peac_estimator.hpp"
#include "peac/pulse_physics.hpp"

struct peac_dataset {
  peac::Dataset data;
};

namespace {

thread_local std::string last_error;

int status_for(peac::Errc code) {
  using peac::Errc;
  switch (code) {
    case Errc::config: return PEAC_ERR_CONFIG;
    case Errc::data:
    case Errc::incomplete_dataset: return PEAC_ERR_DATA;
    case Errc::io: return PEAC_ERR_IO;
    case Errc::invalid_parameter: return PEAC_ERR_INVALID_ARGUMENT;
    default: return PEAC_ERR_NUMERICAL;
  }
}

template <class F>
int guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return PEAC_OK;
  } catch (const peac::Error& e) {
    last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return PEAC_ERR_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) peac::fail(peac::Errc::invalid_parameter, what);
}

peac::PulseConfig to_pulse(const peac_pulse_config& c) {
  peac::PulseConfig p;
  p.k_eff = c.k_eff_rad_per_m;
  p.a_ext = c.a_ext_m_per_s2;
  p.tau = c.tau_s;
  p.T = c.T_s;
  p.gamma = c.gamma;
  return p;
}

peac::RunOptions to_run_options(const peac_run_options* opt) {
  require(opt != nullptr, "options must not be NULL");
  peac::RunOptions r;
  if (opt->config_path) r.config_path = opt->config_path;
  if (opt->data_path) r.data_path = opt->data_path;
  if (opt->out_dir) r.out_dir = opt->out_dir;
  if (opt->has_seed) r.seed = opt->seed;
  if (opt->method) r.method = std::string(opt->method);
  if (opt->threads >= 0) r.threads = opt->threads;
  if (opt->bootstrap >= 0) r.bootstrap = opt->bootstrap;
  if (opt->command_line) r.command_line = opt->command_line;
  return r;
}

}  // namespace

extern "C" {

const char* peac_version(void) { return PEAC_VERSION_STRING; }

const char* peac_status_string(int status) {
  switch (status) {
    case PEAC_OK: return "ok";
    case PEAC_ERR_INTERNAL: return "internal error";
    case PEAC_ERR_CONFIG: return "configuration error";
    case PEAC_ERR_DATA: return "data error";
    case PEAC_ERR_NUMERICAL: return "numerical failure";
    case PEAC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PEAC_ERR_IO: return "i/o error";
    default: return "unknown status";
  }
}

const char* peac_last_error(void) { return last_error.c_str(); }

int peac_dataset_read_csv(const char* path, peac_dataset** out) {
  return guarded([&] {
    require(path && out, "path and out must not be NULL");
    *out = nullptr;
    auto* handle = new peac_dataset{peac::Dataset::read_csv(std::string(path))};
    *out = handle;
  });
}

int peac_dataset_write_csv(const peac_dataset* data, const char* path) {
  return guarded([&] {
    require(data && path, "data and path must not be NULL");
    data->data.write_csv(std::string(path));
  });
}

void peac_dataset_free(peac_dataset* data) { delete data; }

int peac_dataset_size(const peac_dataset* data, size_t* out) {
  return guarded([&] {
    require(data && out, "data and out must not be NULL");
    *out = data->data.size();
  });
}

int peac_dataset_times(const peac_dataset* data, double* times, size_t capacity, size_t* count) {
  return guarded([&] {
    require(data && count, "data and count must not be NULL");
    require(times || capacity == 0, "times must not be NULL when capacity > 0");
    const auto t = data->data.times();
    *count = t.size();
    for (size_t i = 0; i < t.size() && i < capacity; ++i) times[i] = t[i];
  });
}

void peac_pulse_config_init(peac_pulse_config* cfg) {
  if (!cfg) return;
  const peac::PulseConfig d;
  *cfg = {d.k_eff, d.a_ext, d.tau, d.T, d.gamma};
}

int peac_pdf_eval(double s, double amplitude, double mean, double sigma, double* out) {
  return guarded([&] {
    require(out, "out must not be NULL");
    *out = peac::pdf_eval(s, {amplitude, mean, sigma});
  });
}

int peac_peak_merge_threshold(double* out) {
  return guarded([&] {
    require(out, "out must not be NULL");
    *out = peac::peak_merge_threshold();
  });
}

int peac_fit_values(const double* values, size_t n, peac_pdf_fit* out) {
  return guarded([&] {
    require(values && out, "values and out must not be NULL");
    const peac::PdfFit f = peac::fit_values({values, n});
    *out = {f.params.amplitude, f.params.mean, f.params.sigma, f.residual, f.converged ? 1 : 0,
            f.double_peak() ? 1 : 0};
  });
}

int peac_reconstruct_theta_two_state(double a_sum, double a0, double* theta) {
  return guarded([&] {
    require(theta, "theta must not be NULL");
    *theta = peac::reconstruct_theta_two_state(a_sum, a0);
  });
}

int peac_fit_conic(const double* s_minus, const double* s_plus, size_t n, peac_conic* out) {
  return guarded([&] {
    require(s_minus && s_plus && out, "inputs must not be NULL");
    const peac::ConicCoefficients c = peac::fit_conic({s_minus, n}, {s_plus, n});
    *out = {c.c_plus_sq, c.c_minus_sq, c.c0, c.d_plus, c.d_minus, c.d0, c.is_ellipse ? 1 : 0};
  });
}

int peac_theta_from_conic(const peac_conic* conic, double* theta) {
  return guarded([&] {
    require(conic && theta, "inputs must not be NULL");
    peac::ConicCoefficients c;
    c.c_plus_sq = conic->c_plus_sq;
    c.c_minus_sq = conic->c_minus_sq;
    c.c0 = conic->c0;
    c.d_plus = conic->d_plus;
    c.d_minus = conic->d_minus;
    c.d0 = conic->d0;
    c.is_ellipse = conic->is_ellipse != 0;
    *theta = peac::theta_from_conic(c);
  });
}

int peac_finite_pulse_phase(const peac_pulse_config* cfg, double* theta) {
  return guarded([&] {
    require(cfg && theta, "inputs must not be NULL");
    *theta = peac::finite_pulse_phase(to_pulse(*cfg));
  });
}

int peac_theta_of_T(const peac_pulse_config* cfg, double* theta) {
  return guarded([&] {
    require(cfg && theta, "inputs must not be NULL");
    *theta = peac::theta_of_T(to_pulse(*cfg));
  });
}

int peac_fit_gamma(double tau_s, const double* T_s, size_t n, double* gamma) {
  return guarded([&] {
    require(T_s && gamma, "inputs must not be NULL");
    *gamma = peac::fit_gamma(tau_s, {T_s, n});
  });
}

void peac_run_options_init(peac_run_options* opt) {
  if (!opt) return;
  *opt = {};
  opt->threads = -1;
  opt->bootstrap = -1;
}

int peac_run_simulate(const peac_run_options* opt) {
  return guarded([&] { peac::run_simulate(to_run_options(opt)); });
}

int peac_run_estimate(const peac_run_options* opt) {
  return guarded([&] { peac::run_estimate(to_run_options(opt)); });
}

int peac_run_benchmark(const peac_run_options* opt) {
  return guarded([&] { peac::run_benchmark(to_run_options(opt)); });
}

int peac_run_gamma_fit(const peac_run_options* opt) {
  return guarded([&] { peac::run_gamma_fit(to_run_options(opt)); });
}

}  // extern "C"
