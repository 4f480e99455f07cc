#ifndef PEAC_PEAC_H
#define PEAC_PEAC_H

#include <stddef.h>
#include <stdint.h>

#if defined(PEAC_BUILDING_LIBRARY)
#define PEAC_API __attribute__((visibility("default")))
#else
#define PEAC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum peac_status {
  PEAC_OK = 0,
  PEAC_ERR_INTERNAL = 1,
  PEAC_ERR_CONFIG = 2,
  PEAC_ERR_DATA = 3,
  PEAC_ERR_NUMERICAL = 4,
  PEAC_ERR_INVALID_ARGUMENT = 5,
  PEAC_ERR_IO = 6
} peac_status;

PEAC_API const char* peac_version(void);
PEAC_API const char* peac_status_string(int status);
/* Message of the last failing call on this thread; empty when none. */
PEAC_API const char* peac_last_error(void);

typedef struct peac_dataset peac_dataset;

PEAC_API int peac_dataset_read_csv(const char* path, peac_dataset** out);
PEAC_API int peac_dataset_write_csv(const peac_dataset* data, const char* path);
PEAC_API void peac_dataset_free(peac_dataset* data);
PEAC_API int peac_dataset_size(const peac_dataset* data, size_t* out);
/* Number of distinct interrogation times; fills up to `capacity` of them. */
PEAC_API int peac_dataset_times(const peac_dataset* data, double* times, size_t capacity, size_t* count);

typedef struct peac_pdf_fit {
  double amplitude;
  double mean;
  double sigma;
  double residual;
  int converged;
  int double_peak;
} peac_pdf_fit;

typedef struct peac_conic {
  double c_plus_sq;
  double c_minus_sq;
  double c0;
  double d_plus;
  double d_minus;
  double d0;
  int is_ellipse;
} peac_conic;

typedef struct peac_pulse_config {
  double k_eff_rad_per_m;
  double a_ext_m_per_s2;
  double tau_s;
  double T_s;
  double gamma;
} peac_pulse_config;

PEAC_API void peac_pulse_config_init(peac_pulse_config* cfg);

PEAC_API int peac_pdf_eval(double s, double amplitude, double mean, double sigma, double* out);
PEAC_API int peac_peak_merge_threshold(double* out);
PEAC_API int peac_fit_values(const double* values, size_t n, peac_pdf_fit* out);
PEAC_API int peac_reconstruct_theta_two_state(double a_sum, double a0, double* theta);
PEAC_API int peac_fit_conic(const double* s_minus, const double* s_plus, size_t n, peac_conic* out);
PEAC_API int peac_theta_from_conic(const peac_conic* conic, double* theta);
PEAC_API int peac_finite_pulse_phase(const peac_pulse_config* cfg, double* theta);
PEAC_API int peac_theta_of_T(const peac_pulse_config* cfg, double* theta);
PEAC_API int peac_fit_gamma(double tau_s, const double* T_s, size_t n, double* gamma);

typedef struct peac_run_options {
  const char* config_path; /* NULL: defaults */
  const char* data_path;   /* estimate only */
  const char* out_dir;
  int has_seed;
  uint64_t seed;
  const char* method; /* NULL: config value */
  int threads;        /* < 0: config value */
  int bootstrap;      /* < 0: config value */
  const char* command_line;
} peac_run_options;

PEAC_API void peac_run_options_init(peac_run_options* opt);
PEAC_API int peac_run_simulate(const peac_run_options* opt);
PEAC_API int peac_run_estimate(const peac_run_options* opt);
PEAC_API int peac_run_benchmark(const peac_run_options* opt);
PEAC_API int peac_run_gamma_fit(const peac_run_options* opt);

#ifdef __cplusplus
}
#endif

#endif
