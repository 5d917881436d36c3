#ifndef LINREC_H
#define LINREC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define LINREC_OK 0

#define LINREC_ERR_INTERNAL 1

#define LINREC_ERR_CONFIG 2

#define LINREC_ERR_RESOURCE 3

#define LINREC_ERR_NULL 4

#define LINREC_ERR_INVALID 5

/**
 * An experiment configuration.
 */
typedef struct LinrecConfig LinrecConfig;

/**
 * The result of one experiment.
 */
typedef struct LinrecResult LinrecResult;

/**
 * Plain-data view of a [`LinrecResult`]. `bound_ldpc` is NaN when the
 * noise is not binary.
 */
typedef struct LinrecSummary {
  uint64_t trials;
  uint64_t errors;
  double p_hat;
  double ci_lo;
  double ci_hi;
  uint64_t event_missed;
  uint64_t event_false_accept;
  uint64_t event_tie;
  uint64_t pattern_count;
  double rc_realized;
  double rm;
  double rs;
  double bound_thm1;
  double bound_ldpc;
  double bound_thm3;
} LinrecSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next `linrec_*` call on the thread.
 */
const char *linrec_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *linrec_version(void);

/**
 * A configuration with default values.
 */
struct LinrecConfig *linrec_config_new(void);

/**
 * # Safety
 * `cfg` must come from `linrec_config_new` and not be used afterwards.
 */
void linrec_config_free(struct LinrecConfig *cfg);

/**
 * Sets one `section.key` to `value`.
 *
 * # Safety
 * `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
 */
int32_t linrec_config_set(struct LinrecConfig *cfg, const char *key, const char *value);

/**
 * Applies the lines of a config file.
 *
 * # Safety
 * `cfg` must be a live handle; `text` a NUL-terminated string.
 */
int32_t linrec_config_parse(struct LinrecConfig *cfg, const char *text);

/**
 * The resolved configuration as text; release with `linrec_string_free`.
 *
 * # Safety
 * `cfg` must be a live handle or null.
 */
char *linrec_config_to_string(const struct LinrecConfig *cfg);

/**
 * Runs the experiment; on success `*out` receives a new result handle.
 *
 * # Safety
 * `cfg` must be a live handle and `out` a valid pointer.
 */
int32_t linrec_run(const struct LinrecConfig *cfg, struct LinrecResult **out);

/**
 * # Safety
 * `res` must come from `linrec_run` and not be used afterwards.
 */
void linrec_result_free(struct LinrecResult *res);

/**
 * # Safety
 * `res` must be a live handle and `out` a valid pointer.
 */
int32_t linrec_result_summary(const struct LinrecResult *res, struct LinrecSummary *out);

/**
 * The result as CSV (comment line, header, one row); release with
 * `linrec_string_free`.
 *
 * # Safety
 * `res` must be a live handle or null.
 */
char *linrec_result_csv(const struct LinrecResult *res);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void linrec_string_free(char *s);

double linrec_binary_entropy(double q);

/**
 * Truncation-recognizer bound for pattern distribution `qx` and noise `qz`,
 * each an array of `r` probabilities.
 *
 * # Safety
 * `qx` and `qz` must point to `r` doubles; `out` must be valid.
 */
int32_t linrec_thm1_bound(double rm,
                          double rs,
                          uint32_t r,
                          const double *qx,
                          const double *qz,
                          double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t linrec_ldpc_bound(double rm, double rs, double q, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t linrec_thm3_bound(double rm, double rs, double rz, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t linrec_worst_case_noise_bound(uint32_t r, double q, double rate, double *out);

/**
 * Samples a `(dv, dc)`-regular LDPC matrix over GF(r) and returns it in
 * alist format through `*out`; release with `linrec_string_free`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t linrec_ldpc_alist(size_t n, size_t dv, size_t dc, uint32_t r, uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINREC_H */
