#ifndef MULTICLOSURE_H
#define MULTICLOSURE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum McStatus {
  MC_STATUS_OK = 0,
  MC_STATUS_NULL_POINTER = 1,
  MC_STATUS_INVALID_UTF8 = 2,
  MC_STATUS_BUFFER_TOO_SMALL = 3,
  MC_STATUS_INPUT = 4,
  MC_STATUS_UNDEFINED = 5,
  MC_STATUS_UNKNOWN_ATTRIBUTE = 6,
  MC_STATUS_MODEL = 7,
  MC_STATUS_QUADRATURE = 8,
  MC_STATUS_CONVERGENCE = 9,
  MC_STATUS_IO = 10,
  MC_STATUS_PANIC = 11,
} McStatus;

typedef enum McXi {
  /**
   * `k_i * k_j`
   */
  MC_XI_CONFIG = 0,
  /**
   * `<k>^2` on every dyad
   */
  MC_XI_MEAN_DEGREE = 1,
} McXi;

typedef enum McLikelihood {
  MC_LIKELIHOOD_AUTO = 0,
  MC_LIKELIHOOD_EXACT = 1,
  MC_LIKELIHOOD_MULTINOMIAL = 2,
} McLikelihood;

typedef enum McGenerator {
  MC_GENERATOR_RANDOM_COMPLETE = 0,
  MC_GENERATOR_RANDOM_UNIFORM = 1,
  MC_GENERATOR_TRIANGLES = 2,
  MC_GENERATOR_MIXED = 3,
} McGenerator;

typedef struct McFitResult McFitResult;

typedef struct McNetwork McNetwork;

/**
 * One fitted coefficient. `identified == false` leaves `std_err` and `p_value` NaN.
 */
typedef struct McCoefficient {
  double estimate;
  double std_err;
  double p_value;
  bool identified;
} McCoefficient;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library; valid until the next failing call.
 */
const char *mcl_last_error(void);

/**
 * Builds a network on nodes `0..n` from upper-triangle dyad counts in
 * row-major order (`len` must be `n (n - 1) / 2`).
 *
 * # Safety
 * `counts` must point to `len` readable values and `out` must be writable.
 */
enum McStatus mcl_network_from_dyad_counts(size_t n,
                                           const uint64_t *counts,
                                           size_t len,
                                           struct McNetwork **out);

/**
 * Reads an edge-list CSV (`source,target[,count]`).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
enum McStatus mcl_network_read_csv(const char *path, struct McNetwork **out);

/**
 * Reads SocioPatterns contact records (`t i j Ci Cj`); the network gets a
 * `class` attribute.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
enum McStatus mcl_network_read_contacts(const char *path, struct McNetwork **out);

/**
 * Attaches the columns of a `node,<attr>[,...]` CSV.
 *
 * # Safety
 * `net` must be a live handle and `path` a NUL-terminated string.
 */
enum McStatus mcl_network_read_attributes(struct McNetwork *net, const char *path);

/**
 * Sets attribute `name` from `n` node values, in node order.
 *
 * # Safety
 * `net` must be a live handle; `name` and each of the `n` `values` must be
 * NUL-terminated strings.
 */
enum McStatus mcl_network_set_attribute(struct McNetwork *net,
                                        const char *name,
                                        const char *const *values,
                                        size_t n);

/**
 * # Safety
 * `net` must be null or a handle from this library not yet freed.
 */
void mcl_network_free(struct McNetwork *net);

/**
 * Node count (0 for a null handle).
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t mcl_network_node_count(const struct McNetwork *net);

/**
 * Total number of edges (0 for a null handle).
 *
 * # Safety
 * `net` must be null or a live handle.
 */
uint64_t mcl_network_edge_count(const struct McNetwork *net);

/**
 * Writes the `n` node degrees into `out`.
 *
 * # Safety
 * `net` must be a live handle and `out` must hold `len` values.
 */
enum McStatus mcl_network_degrees(const struct McNetwork *net, uint64_t *out, size_t len);

/**
 * Computes a statistic (`weighted_sp`, `unweighted_sp`, `degree`,
 * `match:<attr>`) into `out`, row-major `n * n`.
 *
 * # Safety
 * `net` must be a live handle, `name` a NUL-terminated string and `out`
 * must hold `len` doubles.
 */
enum McStatus mcl_statistic(const struct McNetwork *net, const char *name, double *out, size_t len);

/**
 * R² of the dyad counts regressed on the named statistic.
 *
 * # Safety
 * `net` must be a live handle, `name` a NUL-terminated string, `out` writable.
 */
enum McStatus mcl_variance_explained(const struct McNetwork *net, const char *name, double *out);

/**
 * Fits gHypEG with a comma-separated covariate list, e.g.
 * `"weighted_sp,match:faction"`.
 *
 * # Safety
 * `net` must be a live handle, `covariates` a NUL-terminated string and
 * `out` writable.
 */
enum McStatus mcl_fit_ghype(const struct McNetwork *net,
                            const char *covariates,
                            enum McXi xi,
                            enum McLikelihood likelihood,
                            struct McFitResult **out);

/**
 * Fits the Poisson count model (`sum`, optional `nonzero`, covariates on
 * their raw scale). An empty covariate list fits the intercept only.
 *
 * # Safety
 * `net` must be a live handle, `covariates` a NUL-terminated string and
 * `out` writable.
 */
enum McStatus mcl_fit_count(const struct McNetwork *net,
                            const char *covariates,
                            bool nonzero,
                            struct McFitResult **out);

/**
 * # Safety
 * `fit` must be null or a handle from this library not yet freed.
 */
void mcl_fit_free(struct McFitResult *fit);

/**
 * Number of coefficients (0 for a null handle).
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
size_t mcl_fit_coefficient_count(const struct McFitResult *fit);

/**
 * Name of coefficient `index`, owned by the result handle; null if out of range.
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
const char *mcl_fit_coefficient_name(const struct McFitResult *fit, size_t index);

/**
 * # Safety
 * `fit` must be a live handle and `out` writable.
 */
enum McStatus mcl_fit_coefficient(const struct McFitResult *fit,
                                  size_t index,
                                  struct McCoefficient *out);

/**
 * Fitted log-likelihood (NaN for a null handle).
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
double mcl_fit_log_likelihood(const struct McFitResult *fit);

/**
 * # Safety
 * `fit` must be null or a live handle.
 */
double mcl_fit_aic(const struct McFitResult *fit);

/**
 * # Safety
 * `fit` must be null or a live handle.
 */
double mcl_fit_null_aic(const struct McFitResult *fit);

/**
 * The result as JSON (same layout as the CLI). Release with [`mcl_string_free`].
 *
 * # Safety
 * `fit` must be null or a live handle.
 */
char *mcl_fit_to_json(const struct McFitResult *fit);

/**
 * # Safety
 * `s` must be null or a string returned by this library not yet freed.
 */
void mcl_string_free(char *s);

/**
 * Generates a synthetic network; nodes are labelled `0..n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum McStatus mcl_generate(enum McGenerator kind,
                           size_t n,
                           uint64_t m,
                           size_t n_tri,
                           uint64_t seed,
                           struct McNetwork **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MULTICLOSURE_H */
