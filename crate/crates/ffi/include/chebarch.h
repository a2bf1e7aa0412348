#ifndef CHEBARCH_H
#define CHEBARCH_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ChebStatus {
  CHEB_STATUS_OK = 0,
  CHEB_STATUS_NULL_POINTER = 1,
  CHEB_STATUS_INVALID_INTERVAL = 2,
  CHEB_STATUS_LENGTH_MISMATCH = 3,
  CHEB_STATUS_INDEX_OUT_OF_RANGE = 4,
  CHEB_STATUS_DUPLICATE_NODE = 5,
  CHEB_STATUS_UNKNOWN_TAG = 6,
  CHEB_STATUS_INVALID_PARAMETER = 7,
  CHEB_STATUS_EMPTY_QUERY_SET = 8,
  CHEB_STATUS_SCHEDULE_VIOLATION = 9,
  CHEB_STATUS_BUFFER_TOO_SMALL = 10,
  CHEB_STATUS_PANIC = 11,
} ChebStatus;

typedef enum ChebSplitPolicy {
  CHEB_SPLIT_POLICY_BOTH_ADJACENT = 0,
  CHEB_SPLIT_POLICY_PRECEDING_GAP_ONLY = 1,
  CHEB_SPLIT_POLICY_GREEDY_NONOVERLAP = 2,
} ChebSplitPolicy;

/**
 * Opaque coefficient set.
 */
typedef struct ChebCoeffs ChebCoeffs;

/**
 * Opaque systolic trace together with the configuration that produced it.
 */
typedef struct ChebTrace ChebTrace;

/**
 * Metrics of a simulated run. All three stages report numeric peaks.
 */
typedef struct ChebMetrics {
  size_t peak_ops_coeff;
  size_t peak_ops_poly;
  size_t peak_ops_fir;
  uint64_t latency;
  double hue_percent;
} ChebMetrics;

typedef struct ChebPower {
  size_t a_flash;
  size_t a_sar;
  uint64_t total_au;
  uint64_t baseline_au;
  double savings_percent;
} ChebPower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` as a
 * NUL-terminated string, truncating if needed. Returns the full message
 * length excluding the terminator.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t cheb_last_error_message(char *buf, size_t len);

/**
 * Writes the `degree + 1` Chebyshev nodes on `[lo, hi]` in ascending order.
 *
 * # Safety
 * `out` must be valid for `out_len` writes.
 */
enum ChebStatus cheb_nodes_fill(size_t degree, double lo, double hi, double *out, size_t out_len);

/**
 * Computes expansion coefficients from `len` samples taken at the ascending
 * Chebyshev nodes of `[lo, hi]`.
 *
 * # Safety
 * `samples` must be valid for `len` reads and `out` for one write.
 */
enum ChebStatus cheb_coeffs_new(const double *samples,
                                size_t len,
                                double lo,
                                double hi,
                                struct ChebCoeffs **out);

/**
 * Number of coefficients held, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or come from [`cheb_coeffs_new`].
 */
size_t cheb_coeffs_len(const struct ChebCoeffs *handle);

/**
 * # Safety
 * `handle` must be null or come from [`cheb_coeffs_new`]; `out` must be
 * valid for `out_len` writes.
 */
enum ChebStatus cheb_coeffs_get(const struct ChebCoeffs *handle, double *out, size_t out_len);

/**
 * # Safety
 * `handle` must be null or come from [`cheb_coeffs_new`]; `out` must be
 * valid for one write.
 */
enum ChebStatus cheb_coeffs_interpolate(const struct ChebCoeffs *handle, double x, double *out);

/**
 * # Safety
 * `handle` must be null or come from [`cheb_coeffs_new`] and not be used
 * afterwards.
 */
void cheb_coeffs_free(struct ChebCoeffs *handle);

/**
 * Runs the word-serial datapath on one window of `n_samples` samples
 * (taken at the ascending Chebyshev nodes of `[lo, hi]`) and `n_queries`
 * query points.
 *
 * # Safety
 * Pointers must be valid for the given lengths; `out` for one write.
 */
enum ChebStatus cheb_systolic_run(const double *samples,
                                  size_t n_samples,
                                  const double *queries,
                                  size_t n_queries,
                                  double lo,
                                  double hi,
                                  struct ChebTrace **out);

/**
 * Number of interpolated outputs, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or come from [`cheb_systolic_run`].
 */
size_t cheb_trace_output_count(const struct ChebTrace *handle);

/**
 * Number of simulated cycles, or 0 for a null handle.
 *
 * # Safety
 * `handle` must be null or come from [`cheb_systolic_run`].
 */
size_t cheb_trace_cycle_count(const struct ChebTrace *handle);

/**
 * Output values in query order.
 *
 * # Safety
 * `handle` must be null or come from [`cheb_systolic_run`]; `out` must be
 * valid for `out_len` writes.
 */
enum ChebStatus cheb_trace_outputs(const struct ChebTrace *handle, double *out, size_t out_len);

/**
 * # Safety
 * `handle` must be null or come from [`cheb_systolic_run`]; `out` must be
 * valid for one write.
 */
enum ChebStatus cheb_trace_metrics(const struct ChebTrace *handle, struct ChebMetrics *out);

/**
 * # Safety
 * `handle` must be null or come from [`cheb_systolic_run`] and not be used
 * afterwards.
 */
void cheb_trace_free(struct ChebTrace *handle);

/**
 * Splits a window of `degree + 1` samples between the flash and SAR
 * converters. `assignments` receives 0 for flash and 1 for SAR per sample.
 *
 * # Safety
 * `assignments` must be valid for `len` writes.
 */
enum ChebStatus cheb_adc_split(size_t degree,
                               double t_sar,
                               enum ChebSplitPolicy policy,
                               uint8_t *assignments,
                               size_t len);

/**
 * Comparator energy of `a_flash` flash and `a_sar` SAR conversions at
 * `bits` resolution against `baseline_points` flash conversions.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum ChebStatus cheb_power(size_t a_flash,
                           size_t a_sar,
                           uint32_t bits,
                           size_t baseline_points,
                           struct ChebPower *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHEBARCH_H */
