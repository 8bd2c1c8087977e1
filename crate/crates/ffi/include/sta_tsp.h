#ifndef STA_TSP_H
#define STA_TSP_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `STA_STATUS_OK` is zero; everything else is a failure.
 */
typedef enum StaStatus {
  STA_STATUS_OK = 0,
  STA_STATUS_NULL_POINTER = 1,
  STA_STATUS_INVALID_UTF8 = 2,
  STA_STATUS_PARSE = 3,
  STA_STATUS_INVALID_TOUR = 4,
  STA_STATUS_DIMENSION_MISMATCH = 5,
  STA_STATUS_INVALID_CONFIG = 6,
  STA_STATUS_INVALID_MOVE = 7,
  STA_STATUS_INFEASIBLE_MOVE = 8,
  STA_STATUS_METRIC_MISMATCH = 9,
  STA_STATUS_IO = 10,
  STA_STATUS_SERIALIZATION = 11,
  STA_STATUS_BUFFER_TOO_SMALL = 12,
  STA_STATUS_PANIC = 13,
} StaStatus;

/**
 * Edge weight function used for distances.
 */
typedef enum StaMetric {
  /**
   * Unrounded Euclidean distance.
   */
  STA_METRIC_RAW_EUC = 0,
  STA_METRIC_EUC2D = 1,
  STA_METRIC_GEO = 2,
  STA_METRIC_ATT = 3,
} StaMetric;

/**
 * Opaque parsed instance.
 */
typedef struct StaInstance StaInstance;

/**
 * Opaque solver outcome.
 */
typedef struct StaResult StaResult;

/**
 * State transition search settings. A non-positive `time_limit_secs`
 * means no time limit.
 */
typedef struct StaStaConfig {
  uint64_t search_enforcement;
  uint64_t max_iters;
  uint64_t swap_factor;
  uint64_t shift_factor;
  uint64_t symmetry_factor;
  bool skip_identity_swaps;
  uint64_t seed;
  double time_limit_secs;
} StaStaConfig;

/**
 * Simulated annealing settings.
 */
typedef struct StaSaConfig {
  double t0;
  double cooling;
  uint64_t iters;
  uint64_t seed;
} StaSaConfig;

/**
 * Ant system settings. `rho` is the fraction of pheromone kept per iteration.
 */
typedef struct StaAcoConfig {
  double alpha;
  double beta;
  double rho;
  uint64_t ants;
  uint64_t iters;
  uint64_t seed;
  double initial_pheromone;
} StaAcoConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *sta_last_error(void);

/**
 * Parses TSPLIB text into a new instance using unrounded Euclidean
 * distances.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum StaStatus sta_instance_parse(const char *text, struct StaInstance **out);

/**
 * Reads and parses a TSPLIB file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum StaStatus sta_instance_load(const char *path, struct StaInstance **out);

/**
 * # Safety
 * `inst` must come from this library and not be freed twice. NULL is ignored.
 */
void sta_instance_free(struct StaInstance *inst);

/**
 * Number of nodes, or 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live instance.
 */
size_t sta_instance_dimension(const struct StaInstance *inst);

/**
 * Metric currently used for distances.
 *
 * # Safety
 * `inst` and `out` must be valid pointers.
 */
enum StaStatus sta_instance_metric(const struct StaInstance *inst, enum StaMetric *out);

/**
 * Switches the distance function. Only unrounded Euclidean or the metric
 * declared in the file are allowed.
 *
 * # Safety
 * `inst` must be a live instance.
 */
enum StaStatus sta_instance_set_metric(struct StaInstance *inst, enum StaMetric metric);

/**
 * Closed tour length of `len` 1-based node ids.
 *
 * # Safety
 * `tour` must point to `len` readable values and `out` must be valid.
 */
enum StaStatus sta_tour_length(const struct StaInstance *inst,
                               const uint32_t *tour,
                               size_t len,
                               double *out);

struct StaStaConfig sta_sta_config_default(void);

struct StaSaConfig sta_sa_config_default(void);

struct StaAcoConfig sta_aco_config_default(void);

/**
 * Runs the state transition search.
 *
 * # Safety
 * All pointers must be valid; `config` may be NULL for defaults.
 */
enum StaStatus sta_solve_sta(const struct StaInstance *inst,
                             const struct StaStaConfig *config,
                             struct StaResult **out);

/**
 * Runs simulated annealing.
 *
 * # Safety
 * All pointers must be valid; `config` may be NULL for defaults.
 */
enum StaStatus sta_solve_sa(const struct StaInstance *inst,
                            const struct StaSaConfig *config,
                            struct StaResult **out);

/**
 * Runs the ant system.
 *
 * # Safety
 * All pointers must be valid; `config` may be NULL for defaults.
 */
enum StaStatus sta_solve_aco(const struct StaInstance *inst,
                             const struct StaAcoConfig *config,
                             struct StaResult **out);

/**
 * # Safety
 * `res` must come from this library and not be freed twice. NULL is ignored.
 */
void sta_result_free(struct StaResult *res);

/**
 * Best tour length, or NaN for NULL.
 *
 * # Safety
 * `res` must be NULL or a live result.
 */
double sta_result_best_length(const struct StaResult *res);

/**
 * Number of cost evaluations, or 0 for NULL.
 *
 * # Safety
 * `res` must be NULL or a live result.
 */
uint64_t sta_result_eval_count(const struct StaResult *res);

/**
 * Number of nodes in the best tour, or 0 for NULL.
 *
 * # Safety
 * `res` must be NULL or a live result.
 */
size_t sta_result_tour_len(const struct StaResult *res);

/**
 * Number of trace entries (one per iteration), or 0 for NULL.
 *
 * # Safety
 * `res` must be NULL or a live result.
 */
size_t sta_result_trace_len(const struct StaResult *res);

/**
 * Copies the best tour as 1-based ids into `buf`, which holds `cap` values.
 *
 * # Safety
 * `buf` must be writable for `cap` values.
 */
enum StaStatus sta_result_copy_tour(const struct StaResult *res, uint32_t *buf, size_t cap);

/**
 * Copies the best-so-far trace into `buf`, which holds `cap` values.
 *
 * # Safety
 * `buf` must be writable for `cap` values.
 */
enum StaStatus sta_result_copy_trace(const struct StaResult *res, double *buf, size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STA_TSP_H */
