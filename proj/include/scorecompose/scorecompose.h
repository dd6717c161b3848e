/*
 * scorecompose C API.
 *
 * Analytic 1D Gaussian-mixture diffusion toolkit: closed-form scores and
 * posteriors, noise schedules, a reverse-time variance-exploding sampler,
 * and the guidance-comparison simulation with its KL metrics.
 *
 * Conventions:
 *   - every fallible function returns sc_status; on failure
 *     sc_last_error() holds a thread-local description,
 *   - objects are opaque handles released with their sc_*_free function,
 *   - pointers returned by accessor functions borrow from the handle and
 *     stay valid until it is freed.
 */

#ifndef SCORECOMPOSE_H
#define SCORECOMPOSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SC_API __declspec(dllexport)
#else
#define SC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sc_status {
    SC_OK = 0,
    SC_ERROR_INVALID_ARGUMENT = 1,
    SC_ERROR_PARSE = 2,
    SC_ERROR_NUMERIC = 3
} sc_status;

SC_API const char* sc_version(void);

/* Message for the most recent failure on this thread; never NULL. */
SC_API const char* sc_last_error(void);

/* Frees strings returned through char** out-parameters. */
SC_API void sc_string_free(char* str);

/* ---------------- Gaussian mixtures ---------------- */

typedef struct sc_gmm sc_gmm;

/* Components are (mean, std, weight) triples; weights must sum to 1. */
SC_API sc_status sc_gmm_create(const double* means, const double* stds, const double* weights,
                               size_t n_components, sc_gmm** out);
SC_API void sc_gmm_free(sc_gmm* gmm);
SC_API size_t sc_gmm_component_count(const sc_gmm* gmm);

SC_API sc_status sc_gmm_log_density(const sc_gmm* gmm, double x, double* out);
SC_API sc_status sc_gmm_score(const sc_gmm* gmm, double x, double* out);
SC_API sc_status sc_gmm_diffuse_ve(const sc_gmm* gmm, double sigma, sc_gmm** out);
/* probs_out must hold sc_gmm_component_count(gmm) doubles. */
SC_API sc_status sc_gmm_component_posterior(const sc_gmm* gmm, double x, double sigma,
                                            double* probs_out);
SC_API sc_status sc_gmm_conditional_score(const sc_gmm* gmm, double x, double sigma,
                                          size_t component, double* out);
SC_API sc_status sc_gmm_posterior_guidance_score(const sc_gmm* gmm, double x, double sigma,
                                                 size_t component, double* out);

/* ---------------- noise schedules ---------------- */

/* sigmas_out must hold steps + 1 doubles; endpoints are emitted exactly. */
SC_API sc_status sc_schedule_ve_log_linear(int steps, double sigma_init, double sigma_final,
                                           double* sigmas_out);
SC_API sc_status sc_schedule_vp_shifted_cosine(double t, double shift, double* alpha_out,
                                               double* sigma_out);
/* alphas_out / sigmas_out must hold steps + 1 doubles each. */
SC_API sc_status sc_schedule_logsnr_linear(int steps, double logsnr_min, double logsnr_max,
                                           double* alphas_out, double* sigmas_out);

/* ---------------- sampler ---------------- */

typedef double (*sc_score_fn)(double x, double sigma, void* user_data);

/* Reverse-time VE sampling over a log-linear schedule. samples_out must hold
 * n_samples doubles. The callback may be invoked from multiple threads. */
SC_API sc_status sc_ve_reverse_sample(sc_score_fn score, void* user_data, int steps,
                                      double sigma_init, double sigma_final, size_t n_samples,
                                      uint64_t seed, int terminal_noise, double* samples_out);

/* ---------------- run configuration ---------------- */

typedef struct sc_config sc_config;

SC_API sc_status sc_config_appendix_defaults(sc_config** out);
SC_API sc_status sc_config_parse_json(const char* json_text, sc_config** out);
SC_API sc_status sc_config_to_json(const sc_config* config, char** json_out);
SC_API void sc_config_free(sc_config* config);

SC_API sc_status sc_config_set_seed(sc_config* config, uint64_t seed);
SC_API sc_status sc_config_set_sample_count(sc_config* config, size_t n_samples);
SC_API sc_status sc_config_set_step_count(sc_config* config, int steps);
SC_API sc_status sc_config_set_record_trajectories(sc_config* config, int enabled);
/* Keeps only strategies whose name appears in the comma-separated list. */
SC_API sc_status sc_config_select_strategies(sc_config* config, const char* names);
SC_API sc_status sc_config_set_output_dir(sc_config* config, const char* dir);
SC_API const char* sc_config_output_dir(const sc_config* config);
/* 1 if the named output format is enabled, else 0. */
SC_API int sc_config_has_format(const sc_config* config, const char* format_name);
SC_API uint64_t sc_config_seed(const sc_config* config);

/* Derived scenario parameters. */
SC_API sc_status sc_config_true_enhanced(const sc_config* config, double* mean, double* std_dev);
SC_API sc_status sc_config_enhancement_model(const sc_config* config, double* mean,
                                             double* std_dev);

/* ---------------- simulation results ---------------- */

typedef struct sc_result sc_result;

SC_API sc_status sc_config_run(const sc_config* config, sc_result** out);
/* Sensitivity sweep: one tc_cfg row per scale, one score_average row per
 * alpha. At least one grid must be non-empty. */
SC_API sc_status sc_config_sweep(const sc_config* config, const double* scales, size_t n_scales,
                                 const double* alphas, size_t n_alphas, sc_result** out);
SC_API void sc_result_free(sc_result* result);

SC_API size_t sc_result_count(const sc_result* result);
SC_API const char* sc_result_strategy(const sc_result* result, size_t row);
/* "guidance_scale", "alpha" or "" when the strategy has no parameter. */
SC_API const char* sc_result_parameter_name(const sc_result* result, size_t row);
SC_API sc_status sc_result_parameter_value(const sc_result* result, size_t row, double* out);
SC_API sc_status sc_result_summary(const sc_result* result, size_t row, double* mean,
                                   double* std_dev, double* kl_binned, double* kl_gauss_fit,
                                   double* wall_time_ms);
SC_API sc_status sc_result_samples(const sc_result* result, size_t row, const double** data,
                                   size_t* len);
/* edges has bin_count + 1 entries; the mass arrays have bin_count. */
SC_API sc_status sc_result_histogram(const sc_result* result, size_t row, const double** edges,
                                     const double** empirical_mass, const double** reference_mass,
                                     size_t* bin_count);
/* Recorded trajectory of one sample (steps + 1 values); fails unless the
 * config enabled record_trajectories. */
SC_API sc_status sc_result_trajectory(const sc_result* result, size_t row, size_t sample,
                                      const double** data, size_t* len);

/* ---------------- self test ---------------- */

/* Runs the fast invariant suite; returns 0 iff every check passed and
 * stores the per-check report (one line per check) in report_out. */
SC_API int sc_selftest(char** report_out);

#ifdef __cplusplus
}
#endif

#endif /* SCORECOMPOSE_H */
