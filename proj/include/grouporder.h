/* grouporder — causal ordering among groups of variables in linear models.
 *
 * C interface to the core library: opaque handles, status codes, and
 * malloc'd strings released through gco_string_free. All functions are
 * thread-safe over distinct handles; the last-error message is
 * thread-local.
 *
 * Data layout: matrices are rows-of-variables by columns-of-samples,
 * passed row-major. Group ids are 1-based block positions.
 */
#ifndef GROUPORDER_H
#define GROUPORDER_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gco_status {
  GCO_OK = 0,
  GCO_ERR_INVALID_ARGUMENT = 1,
  GCO_ERR_SINGULAR = 2,         /* regressor covariance not invertible */
  GCO_ERR_DEGENERATE = 3,       /* (near-)constant variable */
  GCO_ERR_SAMPLE_TOO_SMALL = 4,
  GCO_ERR_NO_EFFECT = 5,        /* trace method: zero connection matrix */
  GCO_ERR_PARSE = 6,
  GCO_ERR_INTERNAL = 7
} gco_status;

typedef enum gco_method {
  GCO_METHOD_GDL_HSIC = 0,
  GCO_METHOD_GDL_NLCORR = 1,
  GCO_METHOD_PAIRWISE = 2,
  GCO_METHOD_NAIVE_PAIRWISE = 3,
  GCO_METHOD_TRACE = 4
} gco_method;

typedef struct gco_dataset gco_dataset;
typedef struct gco_model gco_model;
typedef struct gco_trace gco_trace;

/* Message for the most recent failure on this thread; empty string if none. */
const char* gco_last_error(void);
const char* gco_status_name(gco_status status);

/* ----- datasets ----- */

gco_status gco_dataset_create(const double* values, int32_t total_rows,
                              int64_t samples, const int32_t* group_sizes,
                              int32_t group_count, gco_dataset** out);
void gco_dataset_destroy(gco_dataset* dataset);
int32_t gco_dataset_group_count(const gco_dataset* dataset);
int32_t gco_dataset_total_rows(const gco_dataset* dataset);
int64_t gco_dataset_sample_count(const gco_dataset* dataset);
gco_status gco_dataset_group_sizes(const gco_dataset* dataset, int32_t* out);
/* Copies the full matrix into `out` (total_rows * samples doubles, row-major). */
gco_status gco_dataset_values(const gco_dataset* dataset, double* out);

/* ----- ordering ----- */

typedef struct gco_order_options {
  int32_t method;        /* gco_method */
  double lambda;         /* >= 0; 0 = OLS */
  int32_t cv_lambda;     /* nonzero: pick lambda by 10-fold CV */
  int32_t subgroup_size; /* 0 = full groups */
  int32_t subset_count;  /* pooled subsets N; 0 = default (1) */
  uint64_t seed;
} gco_order_options;

void gco_order_options_init(gco_order_options* options);

/* Estimates a causal order. Multiple datasets are score-pooled per
 * iteration (same group structure required). */
gco_status gco_estimate_order(const gco_dataset* const* datasets,
                              int32_t dataset_count,
                              const gco_order_options* options,
                              gco_trace** out);
int32_t gco_trace_group_count(const gco_trace* trace);
int32_t gco_trace_iteration_count(const gco_trace* trace);
/* Order of group ids, most exogenous first; `out` holds group_count ids. */
gco_status gco_trace_order(const gco_trace* trace, int32_t* out);
/* Candidates and scores of one iteration (0-based). Arrays must hold
 * group_count entries; *out_count receives the number written. */
gco_status gco_trace_iteration(const gco_trace* trace, int32_t iteration,
                               int32_t* candidate_ids, double* scores,
                               int32_t* out_count, int32_t* out_chosen);
void gco_trace_destroy(gco_trace* trace);

/* ----- synthetic models ----- */

gco_status gco_model_generate(const char* gen_config_json, gco_model** out);
gco_status gco_model_parse(const char* model_json, gco_model** out);
gco_status gco_model_to_json(const gco_model* model, char** out_json);
int32_t gco_model_group_count(const gco_model* model);
int32_t gco_model_total_rows(const gco_model* model);
gco_status gco_model_group_sizes(const gco_model* model, int32_t* out);
/* Samples the model; `out_truth_order` (group_count ids) receives the
 * ground-truth causal order in the returned dataset's ids. */
gco_status gco_model_sample(const gco_model* model, int64_t samples,
                            uint64_t seed, gco_dataset** out_data,
                            int32_t* out_truth_order);
void gco_model_destroy(gco_model* model);

/* ----- benchmark ----- */

/* Runs the Monte-Carlo benchmark described by the JSON config. On success
 * *out_csv (and *out_json if non-NULL) receive malloc'd strings. */
gco_status gco_bench_run(const char* bench_config_json, char** out_csv,
                         char** out_json);

void gco_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* GROUPORDER_H */
