/*
 * C interface to the graph-signal reconstruction library.
 *
 * Objects are opaque handles created by gsr_*_create/load/build functions and
 * released with the matching gsr_*_free. Every fallible call returns a
 * gsr_status; on failure a description is available from
 * gsr_last_error_message() on the calling thread until the next call.
 *
 * Matrices cross the boundary as row-major arrays of n_nodes * n_times
 * elements (row = node, column = time step).
 */
#ifndef GSR_GSR_H
#define GSR_GSR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GSR_BUILDING_LIBRARY)
#    define GSR_API __declspec(dllexport)
#  else
#    define GSR_API __declspec(dllimport)
#  endif
#else
#  define GSR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gsr_status {
  GSR_OK = 0,
  GSR_ERR_INVALID_ARGUMENT = 1,
  GSR_ERR_K_TOO_LARGE = 2,
  GSR_ERR_DUPLICATE_COORDINATES = 3,
  GSR_ERR_CONVERGENCE_FAILURE = 4,
  GSR_ERR_NEGATIVE_BASE = 5,
  GSR_ERR_HORIZON_TOO_SHORT = 6,
  GSR_ERR_DIMENSION_MISMATCH = 7,
  GSR_ERR_DENSITY_TOO_LOW = 8,
  GSR_ERR_UNSATISFIABLE_COVERAGE = 9,
  GSR_ERR_SINGULAR_SYSTEM = 10,
  GSR_ERR_MAX_ITERATIONS = 11,
  GSR_ERR_PROBLEM_TOO_LARGE = 12,
  GSR_ERR_EMPTY_EVALUATION_SET = 13,
  GSR_ERR_DEGENERATE_RANGE = 14,
  GSR_ERR_MALFORMED_CSV = 15,
  GSR_ERR_DUPLICATE_READING = 16,
  GSR_ERR_UNKNOWN_NODE = 17,
  GSR_ERR_EMPTY_DATASET = 18,
  GSR_ERR_EMPTY_COLUMN = 19,
  GSR_ERR_IO = 20,
  GSR_ERR_INTERNAL = 99
} gsr_status;

/* Short symbolic name, e.g. "SingularSystem". Never NULL. */
GSR_API const char* gsr_status_name(gsr_status status);

/* Process exit code for a status: 0 success, 2 usage/validation, 3 runtime or
 * solver failure. */
GSR_API int gsr_status_exit_code(gsr_status status);

/* Message for the most recent failure on this thread; "" if none. */
GSR_API const char* gsr_last_error_message(void);

typedef struct gsr_sobolev_config {
  double epsilon;      /* >= 0 */
  double beta;         /* > 0 */
  double gamma;        /* > 0 */
  double cg_tolerance; /* (0, 1e-2] */
  size_t max_iterations;
} gsr_sobolev_config;

GSR_API gsr_sobolev_config gsr_sobolev_config_default(void);

typedef struct gsr_dataset gsr_dataset;
typedef struct gsr_graph gsr_graph;
typedef struct gsr_mask gsr_mask;
typedef struct gsr_run gsr_run;
typedef struct gsr_results gsr_results;

/* ---- datasets ---------------------------------------------------------- */

/* `name` may be NULL (the readings file stem is used). */
GSR_API gsr_status gsr_dataset_load(const char* positions_path, const char* readings_path,
                                    const char* name, gsr_dataset** out);

/* Loads the dataset named by the "positions"/"readings" keys of an
 * experiment or grid config, resolving relative paths against `base_dir`
 * (may be NULL) and applying "min_coverage" and "max_time_steps". */
GSR_API gsr_status gsr_dataset_load_from_config(const char* config_json, const char* base_dir,
                                                gsr_dataset** out);

/* Synthetic smooth network: 50 nodes, 100 steps, kNN k = 5, noise 0.05. */
GSR_API gsr_status gsr_dataset_synthetic(uint64_t seed, gsr_dataset** out);

GSR_API gsr_status gsr_dataset_filter(const gsr_dataset* dataset, double min_coverage,
                                      gsr_dataset** out);
GSR_API gsr_status gsr_dataset_truncate(const gsr_dataset* dataset, size_t max_time_steps,
                                        gsr_dataset** out);
GSR_API gsr_status gsr_dataset_dims(const gsr_dataset* dataset, size_t* n_nodes,
                                    size_t* n_times);
/* Row-major values (0 where natively missing) and 0/1 presence flags. Either
 * output pointer may be NULL. `len` must equal n_nodes * n_times. */
GSR_API gsr_status gsr_dataset_values(const gsr_dataset* dataset, double* values,
                                      uint8_t* present, size_t len);
GSR_API size_t gsr_dataset_warning_count(const gsr_dataset* dataset);
GSR_API const char* gsr_dataset_warning(const gsr_dataset* dataset, size_t index);
GSR_API gsr_status gsr_dataset_write(const gsr_dataset* dataset, const char* positions_path,
                                     const char* readings_path);
GSR_API void gsr_dataset_free(gsr_dataset* dataset);

/* ---- graphs ------------------------------------------------------------ */

GSR_API gsr_status gsr_graph_build(const gsr_dataset* dataset, size_t k, gsr_graph** out);

/* Graph over the nodes of a `node_id,x,y` CSV; readings are not needed. */
GSR_API gsr_status gsr_graph_from_positions(const char* positions_path, size_t k,
                                            gsr_graph** out);

/* `xy` holds n (x, y) pairs; node ids become "0", "1", ... */
GSR_API gsr_status gsr_graph_from_coordinates(const double* xy, size_t n, size_t k,
                                              gsr_graph** out);

typedef struct gsr_graph_info {
  size_t n_nodes;
  size_t n_edges;
  size_t n_components;
  double sigma;
  double lambda_min;
  double lambda_2; /* algebraic connectivity */
  double lambda_max;
} gsr_graph_info;

GSR_API gsr_status gsr_graph_summary(const gsr_graph* graph, gsr_graph_info* out);
/* Ascending Laplacian eigenvalues; `len` must equal n_nodes. */
GSR_API gsr_status gsr_graph_eigenvalues(const gsr_graph* graph, double* out, size_t len);
/* Row-major N x N weight matrix. */
GSR_API gsr_status gsr_graph_weights(const gsr_graph* graph, double* out, size_t len);
/* Edge list CSV `src_id,dst_id,weight`. */
GSR_API gsr_status gsr_graph_write_edges(const gsr_graph* graph, const char* path);
GSR_API void gsr_graph_free(gsr_graph* graph);

/* ---- masks ------------------------------------------------------------- */

GSR_API gsr_status gsr_mask_random(size_t n_nodes, size_t n_times, double density, uint64_t seed,
                                   gsr_mask** out);
GSR_API gsr_status gsr_mask_bits(const gsr_mask* mask, uint8_t* out, size_t len);
GSR_API gsr_status gsr_mask_write(const gsr_mask* mask, const char* path);
GSR_API void gsr_mask_free(gsr_mask* mask);

/* ---- direct solves ----------------------------------------------------- */

typedef struct gsr_solve_info {
  size_t iterations;
  double relative_residual;
  double objective;
  int converged;
} gsr_solve_info;

/* Minimizes the Sobolev objective for observations `y` (zero where `mask` is
 * 0). Writes the minimizer to `xbar`. Returns GSR_ERR_MAX_ITERATIONS with
 * `xbar` and `info` filled when the iteration budget runs out. */
GSR_API gsr_status gsr_solve(const gsr_graph* graph, const double* y, const uint8_t* mask,
                             size_t n_nodes, size_t n_times, const gsr_sobolev_config* config,
                             double* xbar, gsr_solve_info* info);

/* Dense direct reference solve (n_nodes * n_times <= 2000). gamma = 0 allowed. */
GSR_API gsr_status gsr_solve_dense(const gsr_graph* graph, const double* y, const uint8_t* mask,
                                   size_t n_nodes, size_t n_times,
                                   const gsr_sobolev_config* config, double* xbar,
                                   gsr_solve_info* info);

/* ---- single masked reconstruction -------------------------------------- */

/* Draws a mask at `density` with `seed`, hides those entries, reconstructs
 * them with `method` ("sobolev", "tikhonov" or "knn_baseline") and scores the
 * hidden entries. On GSR_ERR_MAX_ITERATIONS `*out` is still set. */
GSR_API gsr_status gsr_run_reconstruct(const gsr_dataset* dataset, const gsr_graph* graph,
                                       const char* method, const gsr_sobolev_config* config,
                                       double density, uint64_t seed, gsr_run** out);

typedef struct gsr_run_metrics {
  double rmse;
  double mae;
  size_t n_evaluated;
  size_t n_observed;
  size_t iterations;
  int converged;
  double scale_min;
  double scale_max;
} gsr_run_metrics;

GSR_API gsr_status gsr_run_get_metrics(const gsr_run* run, gsr_run_metrics* out);
GSR_API gsr_status gsr_run_values(const gsr_run* run, double* out, size_t len);
/* `node_id,time_index,value` for every entry, using the dataset's labels. */
GSR_API gsr_status gsr_run_write_reconstruction(const gsr_run* run, const gsr_dataset* dataset,
                                                const char* path);
GSR_API gsr_status gsr_run_write_mask(const gsr_run* run, const char* path);
GSR_API void gsr_run_free(gsr_run* run);

/* ---- experiments ------------------------------------------------------- */

/* Runs every method in an experiment config. `threads` > 0 overrides the
 * config's thread count. */
GSR_API gsr_status gsr_experiment_run(const gsr_dataset* dataset, const char* config_json,
                                      size_t threads, gsr_results** out);

/* Grid search per configured density. */
GSR_API gsr_status gsr_gridsearch_run(const gsr_dataset* dataset, const char* config_json,
                                      size_t threads, gsr_results** out);

typedef struct gsr_result_summary {
  const char* method; /* static string */
  double density;
  double rmse_mean;
  double rmse_std;
  double mae_mean;
  double mae_std;
  double epsilon;
  double beta;
  double gamma;
  size_t repetitions;
  size_t succeeded;
  size_t failed;
} gsr_result_summary;

GSR_API size_t gsr_results_count(const gsr_results* results);
GSR_API gsr_status gsr_results_get(const gsr_results* results, size_t index,
                                   gsr_result_summary* out);
/* Total failed repetitions across all rows. */
GSR_API size_t gsr_results_failed_reps(const gsr_results* results);
/* Fixed-width text table; valid until the handle is freed. */
GSR_API const char* gsr_results_table(const gsr_results* results);
/* Writes `<stem>.csv` and `<stem>.json`. */
GSR_API gsr_status gsr_results_write(const gsr_results* results, const char* stem);
/* Grid searches only: number of densities searched and, per density, the
 * winning config as JSON (valid until the handle is freed). */
GSR_API size_t gsr_results_best_count(const gsr_results* results);
GSR_API const char* gsr_results_best_config_json(const gsr_results* results, size_t index);
GSR_API gsr_status gsr_results_best(const gsr_results* results, size_t index,
                                    gsr_result_summary* out);
GSR_API void gsr_results_free(gsr_results* results);

#ifdef __cplusplus
}
#endif

#endif /* GSR_GSR_H */
