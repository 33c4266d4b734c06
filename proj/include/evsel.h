/* evsel — least-squares SVM training on precomputed feature banks with
 * automatic regularization by Bayesian evidence maximization, evidence-based
 * bank ranking, greedy/exhaustive ensembles, and a cross-validation baseline.
 *
 * C API of the shared library. All functions returning evsel_status set a
 * thread-local error message on failure, readable via evsel_last_error().
 * Objects are opaque handles; every *_free function accepts NULL.
 *
 * Matrix buffer conventions: feature banks are D x N (row-major, one sample
 * per COLUMN, so entry (d, n) sits at d*N + n); labels and score matrices are
 * N x K row-major.
 */

#ifndef EVSEL_H
#define EVSEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EVSEL_API __declspec(dllexport)
#else
#define EVSEL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evsel_status {
  EVSEL_OK = 0,
  EVSEL_ERR_ARGUMENT = 1,    /* bad value or precondition violation */
  EVSEL_ERR_DIMENSION = 2,   /* operand shape mismatch */
  EVSEL_ERR_IO = 3,          /* filesystem failure */
  EVSEL_ERR_FORMAT = 4,      /* malformed file contents */
  EVSEL_ERR_DEGENERATE = 5,  /* degenerate fit or class (evidence undefined) */
  EVSEL_ERR_NUMERICAL = 6,   /* solver failure */
  EVSEL_ERR_UNCONVERGED = 7, /* iteration budget exhausted */
  EVSEL_ERR_UNKNOWN = 8
} evsel_status;

enum {
  EVSEL_METHOD_AITKEN = 0, /* Aitken-accelerated 1-D fixed point (default) */
  EVSEL_METHOD_LAMBDA_PLAIN = 1,
  EVSEL_METHOD_FIXED_POINT_AB = 2,
  EVSEL_METHOD_EM = 3
};

enum { EVSEL_STRATEGY_GREEDY = 0, EVSEL_STRATEGY_EXHAUSTIVE = 1, EVSEL_STRATEGY_SINGLE_BEST = 2 };
enum { EVSEL_MODE_SINGLE_LABEL = 0, EVSEL_MODE_MULTI_LABEL = 1 };
enum { EVSEL_MEASURE_ACCURACY = 0, EVSEL_MEASURE_MAP = 1, EVSEL_MEASURE_AUC = 2 };
enum { EVSEL_SPLIT_TRAIN = 0, EVSEL_SPLIT_TEST = 1 };

typedef struct evsel_bank evsel_bank;
typedef struct evsel_labels evsel_labels;
typedef struct evsel_basis evsel_basis;
typedef struct evsel_result evsel_result;
typedef struct evsel_model evsel_model;
typedef struct evsel_candidates evsel_candidates;
typedef struct evsel_manifest evsel_manifest;

EVSEL_API const char* evsel_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
EVSEL_API const char* evsel_last_error(void);

/* Releases buffers allocated by the library (index arrays, score buffers). */
EVSEL_API void evsel_free(void* p);
EVSEL_API void evsel_string_free(char* s);

typedef struct evsel_optim_options {
  double lambda_init;        /* start point, default 1.0 */
  double epsilon;            /* lambda tolerance, default 1e-5 (absolute; a relative
                                test epsilon*lambda also terminates) */
  int32_t max_iters;         /* default 500 */
  int32_t method;            /* EVSEL_METHOD_*, default aitken */
  int32_t accept_unconverged; /* 0: unconverged classes abort training */
  int32_t workers;           /* parallel width for training/selection, default 1 */
} evsel_optim_options;

EVSEL_API void evsel_optim_options_init(evsel_optim_options* opts);

/* ---- feature banks ------------------------------------------------------ */

EVSEL_API evsel_status evsel_bank_create(const char* name, size_t d, size_t n,
                                         const double* row_major, evsel_bank** out);
EVSEL_API evsel_status evsel_bank_read(const char* path, evsel_bank** out);     /* FBNK */
EVSEL_API evsel_status evsel_bank_read_csv(const char* path, evsel_bank** out); /* RFC-4180 */
EVSEL_API evsel_status evsel_bank_write(const evsel_bank* bank, const char* path);
EVSEL_API size_t evsel_bank_dim(const evsel_bank* bank);
EVSEL_API size_t evsel_bank_samples(const evsel_bank* bank);
EVSEL_API const char* evsel_bank_name(const evsel_bank* bank);
EVSEL_API evsel_status evsel_bank_data(const evsel_bank* bank, double* row_major_out);
EVSEL_API evsel_status evsel_bank_l2_normalize(const evsel_bank* bank, evsel_bank** out,
                                               size_t* negative_entries);
EVSEL_API evsel_status evsel_bank_select(const evsel_bank* bank, const size_t* indices,
                                         size_t count, evsel_bank** out);
/* Row-wise stacking in argument order; the result is named a+b+... */
EVSEL_API evsel_status evsel_bank_concat(const evsel_bank* const* banks, size_t count,
                                         evsel_bank** out);
EVSEL_API void evsel_bank_free(evsel_bank* bank);

/* ---- labels -------------------------------------------------------------- */

EVSEL_API evsel_status evsel_labels_create(size_t n, size_t k, const uint8_t* row_major,
                                           evsel_labels** out);
EVSEL_API evsel_status evsel_labels_read(const char* path, evsel_labels** out); /* LBLS */
EVSEL_API evsel_status evsel_labels_write(const evsel_labels* labels, const char* path);
EVSEL_API size_t evsel_labels_samples(const evsel_labels* labels);
EVSEL_API size_t evsel_labels_classes(const evsel_labels* labels);
EVSEL_API evsel_status evsel_labels_data(const evsel_labels* labels, uint8_t* row_major_out);
EVSEL_API evsel_status evsel_labels_select(const evsel_labels* labels, const size_t* indices,
                                           size_t count, evsel_labels** out);
EVSEL_API void evsel_labels_free(evsel_labels* labels);

/* ---- seeded synthetic data ---------------------------------------------- */

typedef struct evsel_synth_spec {
  uint64_t n, d, k;
  double noise_level;          /* >= 0 */
  double informative_fraction; /* (0, 1] */
  uint64_t seed;
  int32_t nonneg_l2; /* nonnegative entries, unit columns */
} evsel_synth_spec;

EVSEL_API void evsel_synth_spec_init(evsel_synth_spec* spec);

/* One-hot labels plus features; *test_indices (may be NULL) receives a
 * malloc'd deterministic 20% holdout, released with evsel_free. */
EVSEL_API evsel_status evsel_synth_generate(const evsel_synth_spec* spec, evsel_bank** bank,
                                            evsel_labels** labels, size_t** test_indices,
                                            size_t* test_count);

/* Features for existing labels. class_groups (NULL for identity) maps each of
 * the k classes to a mean-direction group; classes sharing a group are
 * indistinguishable in this bank. */
EVSEL_API evsel_status evsel_synth_generate_bank(const evsel_synth_spec* spec,
                                                 const evsel_labels* labels,
                                                 const int32_t* class_groups, evsel_bank** out);

/* ---- eigenbasis and per-class evidence optimization ---------------------- */

EVSEL_API evsel_status evsel_basis_build(const evsel_bank* bank, const evsel_labels* labels,
                                         evsel_basis** out);
EVSEL_API size_t evsel_basis_classes(const evsel_basis* basis);
EVSEL_API void evsel_basis_free(evsel_basis* basis);

typedef struct evsel_hyperparams {
  double alpha;
  double beta;
  double lambda;
  double gamma;
  double log_evidence;
} evsel_hyperparams;

EVSEL_API evsel_status evsel_optimize_lambda(const evsel_basis* basis, size_t class_index,
                                             const evsel_optim_options* opts, evsel_result** out);
EVSEL_API evsel_status evsel_result_state(const evsel_result* result, evsel_hyperparams* out);
EVSEL_API int32_t evsel_result_converged(const evsel_result* result);
EVSEL_API int32_t evsel_result_iterations(const evsel_result* result);
EVSEL_API int32_t evsel_result_fallbacks(const evsel_result* result);
EVSEL_API size_t evsel_result_trace_size(const evsel_result* result);
/* Copies the iteration trace into caller buffers of trace_size entries; any
 * output pointer may be NULL. Entry i belongs to iteration i. */
EVSEL_API evsel_status evsel_result_trace(const evsel_result* result, double* lambdas,
                                          double* log_evidences, double* elapsed_ms);
EVSEL_API void evsel_result_free(evsel_result* result);

EVSEL_API evsel_status evsel_log_evidence_1d(const evsel_basis* basis, size_t class_index,
                                             double lambda, double* out);
EVSEL_API evsel_status evsel_log_evidence_ab(const evsel_basis* basis, size_t class_index,
                                             double alpha, double beta, double* out);

/* Slope of the update map at infinity; warning is set when slope >= 1 (the
 * fixed-point existence condition is not certified). y is length n in {0,1}. */
EVSEL_API evsel_status evsel_asymptotic_slope(const evsel_bank* bank, const uint8_t* y, size_t n,
                                              double* slope, int32_t* warning);

/* ---- training, prediction, model files ----------------------------------- */

EVSEL_API evsel_status evsel_train(const evsel_bank* bank, const evsel_labels* labels,
                                   const evsel_optim_options* opts, evsel_model** out);
EVSEL_API evsel_status evsel_model_save(const evsel_model* model, const char* path); /* BMDL */
EVSEL_API evsel_status evsel_model_load(const char* path, evsel_model** out);
EVSEL_API size_t evsel_model_dim(const evsel_model* model);
EVSEL_API size_t evsel_model_classes(const evsel_model* model);
EVSEL_API double evsel_model_evidence(const evsel_model* model);
EVSEL_API const char* evsel_model_signature(const evsel_model* model);
EVSEL_API evsel_status evsel_model_lambdas(const evsel_model* model, double* out /* k */);
EVSEL_API evsel_status evsel_model_weights(const evsel_model* model,
                                           double* out /* d*k, column-major by class */);
/* Per-class optimization result; only available on freshly trained models
 * (BMDL files do not carry traces). */
EVSEL_API evsel_status evsel_model_result(const evsel_model* model, size_t class_index,
                                          evsel_result** out);
/* scores_out: n x k row-major, caller-allocated. */
EVSEL_API evsel_status evsel_predict(const evsel_model* model, const evsel_bank* bank,
                                     double* scores_out);
EVSEL_API void evsel_model_free(evsel_model* model);

/* ---- evaluation measures -------------------------------------------------- */

/* scores: n x k row-major. per_class (length k) may be NULL. Accuracy needs
 * one-hot labels; map needs >= 1 positive per class; auc needs both. */
EVSEL_API evsel_status evsel_metric_accuracy(const double* scores, size_t n, size_t k,
                                             const evsel_labels* labels, double* per_class,
                                             double* mean);
EVSEL_API evsel_status evsel_metric_map(const double* scores, size_t n, size_t k,
                                        const evsel_labels* labels, double* per_class,
                                        double* mean);
EVSEL_API evsel_status evsel_metric_auc(const double* scores, size_t n, size_t k,
                                        const evsel_labels* labels, double* per_class,
                                        double* mean);

EVSEL_API evsel_status evsel_scores_write_csv(const char* path, const double* scores, size_t n,
                                              size_t k);
EVSEL_API evsel_status evsel_scores_read_csv(const char* path, double** scores, size_t* n,
                                             size_t* k);

/* ---- bank selection and ensembles ----------------------------------------- */

EVSEL_API evsel_status evsel_candidates_create(const evsel_labels* labels,
                                               evsel_candidates** out);
/* Banks are copied in; add order defines the default concatenation order. */
EVSEL_API evsel_status evsel_candidates_add(evsel_candidates* cands, const evsel_bank* bank);
EVSEL_API void evsel_candidates_free(evsel_candidates* cands);

/* Trains one model per bank, ranks by overall evidence. json_out receives the
 * ranking document, trace_csv_out the per-class iteration traces; either may
 * be NULL. Strings are released with evsel_string_free. */
EVSEL_API evsel_status evsel_rank_banks(const evsel_candidates* cands,
                                        const evsel_optim_options* opts, char** json_out,
                                        char** trace_csv_out);

/* Greedy/exhaustive/single-best ensemble construction. model_out (may be
 * NULL) receives the final trained model, json_out the decision report. */
EVSEL_API evsel_status evsel_ensemble(const evsel_candidates* cands,
                                      const evsel_optim_options* opts, int32_t strategy,
                                      evsel_model** model_out, char** json_out);

/* k-fold grid search baseline. chosen_out (length = labels' class count) and
 * json_out may be NULL. */
EVSEL_API evsel_status evsel_cv_grid_search(const evsel_bank* bank, const evsel_labels* labels,
                                            const double* grid, size_t grid_len, int32_t folds,
                                            uint64_t seed, int32_t mode, char** json_out,
                                            double* chosen_out);

/* ---- dataset manifests ----------------------------------------------------- */

EVSEL_API evsel_status evsel_manifest_load(const char* path, evsel_manifest** out);
EVSEL_API const char* evsel_manifest_task(const evsel_manifest* m);
EVSEL_API int32_t evsel_manifest_mode(const evsel_manifest* m);    /* EVSEL_MODE_* */
EVSEL_API int32_t evsel_manifest_measure(const evsel_manifest* m); /* EVSEL_MEASURE_* */
EVSEL_API size_t evsel_manifest_bank_count(const evsel_manifest* m);
EVSEL_API const char* evsel_manifest_bank_name(const evsel_manifest* m, size_t index);
EVSEL_API evsel_status evsel_manifest_open_bank(const evsel_manifest* m, size_t index,
                                                evsel_bank** out);
EVSEL_API evsel_status evsel_manifest_open_labels(const evsel_manifest* m, evsel_labels** out);
EVSEL_API int32_t evsel_manifest_has_split(const evsel_manifest* m);
/* which: EVSEL_SPLIT_TRAIN or EVSEL_SPLIT_TEST. *indices is malloc'd. */
EVSEL_API evsel_status evsel_manifest_split(const evsel_manifest* m, int32_t which,
                                            size_t** indices, size_t* count);
EVSEL_API void evsel_manifest_free(evsel_manifest* m);

#ifdef __cplusplus
}
#endif

#endif /* EVSEL_H */
