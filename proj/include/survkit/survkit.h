/*
 * survkit C interface.
 *
 * Every object is an opaque handle created by a svk_* constructor and
 * released with the matching *_free function. Functions return SVK_OK on
 * success; on failure svk_last_error() describes what went wrong for the
 * calling thread.
 */
#ifndef SURVKIT_SURVKIT_H
#define SURVKIT_SURVKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SVK_API __declspec(dllexport)
#else
#define SVK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum svk_status {
  SVK_OK = 0,
  SVK_ERROR_IO = 1,
  SVK_ERROR_PARSE = 2,
  SVK_ERROR_VALIDATION = 3,
  SVK_ERROR_INVALID_ARGUMENT = 4,
  SVK_ERROR_NUMERIC = 5
} svk_status;

typedef struct svk_dataset svk_dataset;
typedef struct svk_panel svk_panel;
typedef struct svk_curve svk_curve;
typedef struct svk_transition_path svk_transition_path;
typedef struct svk_test_result svk_test_result;
typedef struct svk_cox_fit svk_cox_fit;

SVK_API const char* svk_version(void);
/* Message for the most recent failure on this thread; empty if none. */
SVK_API const char* svk_last_error(void);
SVK_API void svk_string_free(char* s);

/* ------------------------------------------------------------------ data */

SVK_API svk_status svk_dataset_read_csv(const char* path, svk_dataset** out);
/* covariates may be NULL when p == 0; rows are subject intervals. group may
 * be NULL. Use "CENSORED" in `to` for censored intervals. */
SVK_API svk_status svk_dataset_from_records(
    const char* const* subject, const double* entry, const double* exit_time,
    const char* const* from, const char* const* to, const char* const* group,
    const double* covariates, size_t n, size_t p, svk_dataset** out);
SVK_API svk_status svk_dataset_write_csv(const svk_dataset* data,
                                         const char* path);
SVK_API void svk_dataset_free(svk_dataset* data);

SVK_API size_t svk_dataset_size(const svk_dataset* data);
SVK_API size_t svk_dataset_covariate_count(const svk_dataset* data);
SVK_API const char* svk_dataset_covariate_name(const svk_dataset* data,
                                               size_t index);

/* Simulation spec as JSON; see the study documentation for the schema. */
SVK_API svk_status svk_simulate_json(const char* spec_json, uint64_t seed,
                                     svk_dataset** out);

/* ----------------------------------------------------------------- panel */

/* states may be NULL (inferred from the data). */
SVK_API svk_status svk_panel_build(const svk_dataset* data,
                                   const char* const* states, size_t n_states,
                                   svk_panel** out);
SVK_API void svk_panel_free(svk_panel* panel);
SVK_API size_t svk_panel_time_count(const svk_panel* panel);
SVK_API size_t svk_panel_state_count(const svk_panel* panel);
SVK_API size_t svk_panel_group_count(const svk_panel* panel);
SVK_API const char* svk_panel_state(const svk_panel* panel, size_t index);
SVK_API const char* svk_panel_group(const svk_panel* panel, size_t index);
SVK_API svk_status svk_panel_time(const svk_panel* panel, size_t index,
                                  double* time);
/* Distinct observed (from, to) pairs. */
SVK_API size_t svk_panel_transition_count(const svk_panel* panel);
SVK_API svk_status svk_panel_transition(const svk_panel* panel, size_t index,
                                        size_t* from_state, size_t* to_state);

/* ---------------------------------------------------------------- curves */

SVK_API svk_status svk_nelson_aalen(const svk_panel* panel, const char* from,
                                    const char* to, svk_curve** out);
SVK_API svk_status svk_kaplan_meier(const svk_panel* panel, svk_curve** out);
/* Adds a pointwise confidence band in place. linear_scale = 0 uses the
 * range-respecting transformed scale. */
SVK_API svk_status svk_curve_confidence(svk_curve* curve, double level,
                                        int linear_scale);
SVK_API void svk_curve_free(svk_curve* curve);
SVK_API size_t svk_curve_size(const svk_curve* curve);
SVK_API double svk_curve_origin(const svk_curve* curve);
SVK_API int svk_curve_has_band(const svk_curve* curve);
/* Any output pointer may be NULL. lower/upper are NaN without a band. */
SVK_API svk_status svk_curve_row(const svk_curve* curve, size_t index,
                                 double* time, double* estimate,
                                 double* variance, double* lower,
                                 double* upper);

/* ------------------------------------------------------------ multistate */

SVK_API svk_status svk_aalen_johansen(const svk_panel* panel, double s,
                                      double t, int with_covariance,
                                      svk_transition_path** out);
SVK_API void svk_transition_path_free(svk_transition_path* path);
SVK_API size_t svk_transition_path_size(const svk_transition_path* path);
SVK_API size_t svk_transition_path_state_count(const svk_transition_path* path);
SVK_API const char* svk_transition_path_state(const svk_transition_path* path,
                                              size_t index);
SVK_API svk_status svk_transition_path_time(const svk_transition_path* path,
                                            size_t index, double* time);
/* k*k entries, row-major. */
SVK_API svk_status svk_transition_path_matrix(const svk_transition_path* path,
                                              size_t index, double* out);
/* Variance of each transition probability entry; k*k, row-major. */
SVK_API svk_status svk_transition_path_variances(
    const svk_transition_path* path, size_t index, double* out);
/* Full covariance of the transition matrix entries: (k*k) x (k*k),
 * out[(a*k+b)*k*k + (c*k+d)] = cov(P(a,b), P(c,d)). */
SVK_API svk_status svk_transition_path_covariance(
    const svk_transition_path* path, size_t index, double* out);

/* ----------------------------------------------------------------- tests */

/* weights: "logrank", "gehan", "tarone-ware" or "peto-peto"; horizon may be
 * infinity. */
SVK_API svk_status svk_ksample_test(const svk_panel* panel, const char* weights,
                                    double horizon, svk_test_result** out);
SVK_API void svk_test_result_free(svk_test_result* result);
SVK_API size_t svk_test_result_dim(const svk_test_result* result);
SVK_API svk_status svk_test_result_statistic(const svk_test_result* result,
                                             double* out);
SVK_API svk_status svk_test_result_covariance(const svk_test_result* result,
                                              double* out);
SVK_API double svk_test_result_chi_square(const svk_test_result* result);
SVK_API int svk_test_result_df(const svk_test_result* result);
SVK_API double svk_test_result_p_value(const svk_test_result* result);
SVK_API int svk_test_result_singular(const svk_test_result* result);

/* ------------------------------------------------------------------- cox */

/* covariate_names may be NULL to use every covariate column; init may be
 * NULL for a zero start. A monotone-likelihood fit returns SVK_OK with
 * svk_cox_converged() == 0 and svk_cox_monotone() == 1. */
SVK_API svk_status svk_cox_fit_run(const svk_dataset* data,
                                   const char* const* covariate_names,
                                   size_t n_covariates, const double* init,
                                   double tolerance, int max_iterations,
                                   svk_cox_fit** out);
SVK_API void svk_cox_fit_free(svk_cox_fit* fit);
SVK_API size_t svk_cox_dim(const svk_cox_fit* fit);
SVK_API svk_status svk_cox_beta(const svk_cox_fit* fit, double* out);
SVK_API svk_status svk_cox_standard_errors(const svk_cox_fit* fit, double* out);
SVK_API svk_status svk_cox_information(const svk_cox_fit* fit, double* out);
SVK_API double svk_cox_loglik(const svk_cox_fit* fit);
SVK_API int svk_cox_iterations(const svk_cox_fit* fit);
SVK_API int svk_cox_converged(const svk_cox_fit* fit);
SVK_API int svk_cox_monotone(const svk_cox_fit* fit);
SVK_API svk_status svk_cox_baseline(const svk_cox_fit* fit, svk_curve** out);
SVK_API size_t svk_cox_subject_count(const svk_cox_fit* fit);
SVK_API const char* svk_cox_subject(const svk_cox_fit* fit, size_t index);
SVK_API double svk_cox_residual_final(const svk_cox_fit* fit, size_t index);
/* Residual path of one subject as a curve (variance is NaN). */
SVK_API svk_status svk_cox_residual_path(const svk_cox_fit* fit, size_t index,
                                         svk_curve** out);

/* ----------------------------------------------------------------- study */

/* Runs a JSON study configuration and returns the report as a JSON string
 * (release with svk_string_free). */
SVK_API svk_status svk_study_run(const char* config_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* SURVKIT_SURVKIT_H */
