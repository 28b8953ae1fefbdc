#ifndef SZEGO_LAB_H
#define SZEGO_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SzegoStatus {
  SZEGO_STATUS_OK = 0,
  /**
   * A null pointer, bad UTF-8 or an index out of range.
   */
  SZEGO_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Unknown family, suite or malformed JSON parameters.
   */
  SZEGO_STATUS_CONFIG = 2,
  /**
   * The root finder or a Newton/quadrature loop gave up.
   */
  SZEGO_STATUS_NO_CONVERGENCE = 3,
  /**
   * A numerical domain or precondition error.
   */
  SZEGO_STATUS_DOMAIN = 4,
  /**
   * A verification suite ran and its criteria were not met.
   */
  SZEGO_STATUS_VERIFICATION_FAILED = 5,
  SZEGO_STATUS_PANIC = 6,
} SzegoStatus;

/**
 * A sampled limit curve, pieces concatenated.
 */
typedef struct SzegoCurve SzegoCurve;

/**
 * Zeros of one section, origin zeros first.
 */
typedef struct SzegoZeroSet SzegoZeroSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *szego_last_error(void);

const char *szego_version(void);

/**
 * Zeros of the normalized degree-n section of `family` (a preset name or a
 * JSON spec). `start_bits` = 0 picks max(128, 4n).
 *
 * # Safety
 * `family` is a NUL-terminated string; `out` is writable.
 */
enum SzegoStatus szego_zeros_compute(const char *family,
                                     uintptr_t n,
                                     uint32_t start_bits,
                                     struct SzegoZeroSet **out);

/**
 * Number of zeros counted with the origin's multiplicity; 0 for null.
 *
 * # Safety
 * `set` is null or a live handle.
 */
uintptr_t szego_zeros_len(const struct SzegoZeroSet *set);

/**
 * The k-th zero as doubles.
 *
 * # Safety
 * `set` is a live handle; `re` and `im` are writable.
 */
enum SzegoStatus szego_zeros_get(const struct SzegoZeroSet *set,
                                 uintptr_t k,
                                 double *re,
                                 double *im);

/**
 * CSV with header family,n,k,re,im,residual at 30 significant digits; null
 * on failure.
 *
 * # Safety
 * `set` is null or a live handle.
 */
char *szego_zeros_to_csv(const struct SzegoZeroSet *set);

/**
 * # Safety
 * `set` is null or a handle from `szego_zeros_compute`, not yet freed.
 */
void szego_zeros_free(struct SzegoZeroSet *set);

/**
 * Samples a limit curve. `params_json` may be null for curves without
 * parameters.
 *
 * # Safety
 * `kind` is a NUL-terminated string, `params_json` null or one; `out` is writable.
 */
enum SzegoStatus szego_curve_sample(const char *kind,
                                    const char *params_json,
                                    uintptr_t samples,
                                    struct SzegoCurve **out);

/**
 * # Safety
 * `curve` is null or a live handle.
 */
uintptr_t szego_curve_len(const struct SzegoCurve *curve);

/**
 * # Safety
 * `curve` is a live handle; `re` and `im` are writable.
 */
enum SzegoStatus szego_curve_get(const struct SzegoCurve *curve,
                                 uintptr_t k,
                                 double *re,
                                 double *im);

/**
 * CSV with header theta,re,im,residual,piece; null on failure.
 *
 * # Safety
 * `curve` is null or a live handle.
 */
char *szego_curve_to_csv(const struct SzegoCurve *curve);

/**
 * # Safety
 * `curve` is null or a handle from `szego_curve_sample`, not yet freed.
 */
void szego_curve_free(struct SzegoCurve *curve);

/**
 * Runs a verification suite (buckholtz, cvw, rate, watson, annulus, lft,
 * nr, counts) with JSON parameters named like the command-line flags.
 * On `Ok` or `VerificationFailed` the JSON report is stored in
 * `*report_json`.
 *
 * # Safety
 * `suite` is a NUL-terminated string, `params_json` null or one;
 * `report_json` is writable.
 */
enum SzegoStatus szego_verify(const char *suite, const char *params_json, char **report_json);

/**
 * # Safety
 * `s` is null or a string returned by this library, not yet freed.
 */
void szego_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SZEGO_LAB_H */
