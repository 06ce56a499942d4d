#ifndef ISOGROUP_H
#define ISOGROUP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of the C interface.
 */
typedef enum IsogroupStatus {
  ISOGROUP_STATUS_OK = 0,
  ISOGROUP_STATUS_NULL_POINTER = 1,
  ISOGROUP_STATUS_INVALID_ARGUMENT = 2,
  ISOGROUP_STATUS_DIMENSION_MISMATCH = 3,
  ISOGROUP_STATUS_NOT_ORTHOGONAL = 4,
  ISOGROUP_STATUS_NON_DISCRETE = 5,
  ISOGROUP_STATUS_PARSE_ERROR = 6,
  ISOGROUP_STATUS_PRECONDITION = 7,
  ISOGROUP_STATUS_IO = 8,
  ISOGROUP_STATUS_PANIC = 9,
} IsogroupStatus;

typedef enum IsogroupVerdict {
  ISOGROUP_VERDICT_INFINITE_MULTIPLICITY_THM12 = 0,
  ISOGROUP_VERDICT_INFINITE_MULTIPLICITY_THM13 = 1,
  ISOGROUP_VERDICT_UNKNOWN = 2,
  ISOGROUP_VERDICT_NO_OBSTRUCTION_CLAIMED = 3,
  ISOGROUP_VERDICT_INVALID_INPUT = 4,
} IsogroupVerdict;

/**
 * Enumerated ball of a group.
 */
typedef struct IsogroupBall IsogroupBall;

/**
 * Finitely generated subgroup of `E(n)`.
 */
typedef struct IsogroupGroup IsogroupGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into this library from the same thread.
 */
const char *isogroup_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *isogroup_version(void);

/**
 * Creates a group from `count` generators in dimension `dim`.
 *
 * `orts` holds `count · dim · dim` doubles (each matrix row-major) and
 * `trans` holds `count · dim` doubles. Orthogonality is checked at `tol`.
 *
 * # Safety
 * The arrays must be readable for the stated lengths and `out` writable.
 */
enum IsogroupStatus isogroup_group_new(size_t dim,
                                       size_t count,
                                       const double *orts,
                                       const double *trans,
                                       double tol,
                                       struct IsogroupGroup **out);

/**
 * # Safety
 * `group` must come from [`isogroup_group_new`] and not be freed twice.
 */
void isogroup_group_free(struct IsogroupGroup *group);

/**
 * Ambient dimension, or 0 for a null handle.
 *
 * # Safety
 * `group` must be null or a live handle.
 */
size_t isogroup_group_dim(const struct IsogroupGroup *group);

/**
 * Enumerates the elements with translation norm at most `radius`.
 *
 * # Safety
 * `group` must be a live handle and `out` writable.
 */
enum IsogroupStatus isogroup_ball_enumerate(const struct IsogroupGroup *group,
                                            double radius,
                                            struct IsogroupBall **out);

/**
 * # Safety
 * `ball` must come from [`isogroup_ball_enumerate`] and not be freed twice.
 */
void isogroup_ball_free(struct IsogroupBall *ball);

/**
 * Number of elements, or 0 for a null handle.
 *
 * # Safety
 * `ball` must be null or a live handle.
 */
size_t isogroup_ball_len(const struct IsogroupBall *ball);

/**
 * Whether enumeration finished below its word and element limits.
 *
 * # Safety
 * `ball` must be null or a live handle.
 */
bool isogroup_ball_is_complete(const struct IsogroupBall *ball);

/**
 * Number of elements with translation norm at most `r`.
 *
 * # Safety
 * `ball` must be a live handle and `out` writable.
 */
enum IsogroupStatus isogroup_ball_count_within(const struct IsogroupBall *ball,
                                               double r,
                                               size_t *out);

/**
 * Copies element `index` into `ort_out` (`dim · dim`, row-major) and
 * `tran_out` (`dim`).
 *
 * # Safety
 * `ball` must be a live handle and the output arrays writable for the
 * stated lengths.
 */
enum IsogroupStatus isogroup_ball_element(const struct IsogroupBall *ball,
                                          size_t index,
                                          double *ort_out,
                                          double *tran_out);

/**
 * Rank of the lattice of pure translations found in the ball.
 *
 * # Safety
 * `ball` must be a live handle and `out` writable.
 */
enum IsogroupStatus isogroup_ball_translation_rank(const struct IsogroupBall *ball, size_t *out);

/**
 * Growth dimension from a log-log fit of `N(r)` over `count` radii.
 *
 * # Safety
 * `radii` must hold `count` doubles; the outputs must be writable.
 */
enum IsogroupStatus isogroup_estimate_dimension(const struct IsogroupGroup *group,
                                                const double *radii,
                                                size_t count,
                                                size_t *k_hat_out,
                                                double *slope_out,
                                                double *residual_out);

/**
 * Classifies `(n, dim Γ, dim Γ_T)`; never fails.
 */
enum IsogroupVerdict isogroup_classify(int64_t n, int64_t k, int64_t l);

/**
 * Condition `l / k > 1 / (n − k)` in exact integer arithmetic.
 *
 * # Safety
 * `out` must be writable.
 */
enum IsogroupStatus isogroup_condition_11(int64_t n, int64_t k, int64_t l, bool *out);

/**
 * Exponent form of the same condition, `n − k − n(n−k−1)/(n−l−1) < 0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum IsogroupStatus isogroup_exponent_condition(int64_t n, int64_t k, int64_t l, bool *out);

/**
 * Runs the analysis pipeline on a JSON configuration held in memory. On
 * success `report_out` receives the JSON report (release it with
 * [`isogroup_string_free`]) and `exit_code_out` the command-line exit code.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; the outputs must be
 * writable.
 */
enum IsogroupStatus isogroup_analyze_json(const char *config_json,
                                          char **report_out,
                                          int32_t *exit_code_out);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void isogroup_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOGROUP_H */
