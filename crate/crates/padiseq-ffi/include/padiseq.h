/* C interface of the padiseq library. Generated; do not edit. */

#ifndef PADISEQ_H
#define PADISEQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. Matches the CLI exit codes where the
 * cause is the same kind of failure.
 */
typedef enum PsqStatus {
  /**
   * The call succeeded.
   */
  PSQ_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  PSQ_STATUS_NULL_ARGUMENT = 1,
  /**
   * The input is outside the function's domain.
   */
  PSQ_STATUS_DOMAIN_ERROR = 2,
  /**
   * A certified bound could not be met at working precision.
   */
  PSQ_STATUS_PRECISION_ERROR = 3,
  /**
   * A string argument did not parse.
   */
  PSQ_STATUS_PARSE_ERROR = 4,
  /**
   * An internal invariant failed; the library state is still sound.
   */
  PSQ_STATUS_INTERNAL_ERROR = 5,
} PsqStatus;

/**
 * Opaque handle to a factored base b >= 2.
 */
typedef struct PsqBase PsqBase;

/**
 * Opaque handle to a three-squares classification report.
 */
typedef struct PsqThreeSquares PsqThreeSquares;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *psq_version(void);

/**
 * Message of the current thread's most recent failure; empty when the last
 * call succeeded. Valid until the thread's next padiseq call; do not free.
 */
const char *psq_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string obtained from this library and not yet freed.
 */
void psq_string_free(char *s);

/**
 * Creates a factored base handle for b >= 2.
 *
 * # Safety
 * `out` must point to writable memory for one pointer.
 */
enum PsqStatus psq_base_new(uint64_t b, struct PsqBase **out);

/**
 * Releases a base handle. NULL is ignored.
 *
 * # Safety
 * `base` must be NULL or an unfreed handle from `psq_base_new`.
 */
void psq_base_free(struct PsqBase *base);

/**
 * The integer value b of a base handle; 0 for NULL.
 *
 * # Safety
 * `base` must be NULL or a live handle from `psq_base_new`.
 */
uint64_t psq_base_value(const struct PsqBase *base);

/**
 * nu_b of a decimal integer. On success, `*infinite` is 1 and `*nu` is 0
 * when the value is 0, else `*infinite` is 0 and `*nu` holds the valuation.
 *
 * # Safety
 * `base` must be a live handle, `value` a NUL-terminated string, and `nu`
 * and `infinite` writable.
 */
enum PsqStatus psq_valuation(const struct PsqBase *base,
                             const char *value,
                             uint64_t *nu,
                             int32_t *infinite);

/**
 * L_b of a decimal integer, as a new decimal string in `*out`.
 *
 * # Safety
 * `base` must be a live handle, `value` a NUL-terminated string, and `out`
 * writable for one pointer.
 */
enum PsqStatus psq_last_nonzero(const struct PsqBase *base, const char *value, char **out);

/**
 * ell_{b,d} of a decimal integer, as a new decimal string in `*out`.
 *
 * # Safety
 * `base` must be a live handle, `value` a NUL-terminated string, and `out`
 * writable for one pointer.
 */
enum PsqStatus psq_last_digits(const struct PsqBase *base,
                               const char *value,
                               uint32_t d,
                               char **out);

/**
 * The n-th term of the (a, b) Lucas sequence, as a new decimal string.
 *
 * # Safety
 * `out` must be writable for one pointer.
 */
enum PsqStatus psq_lucas_term(int64_t a, int64_t b, uint64_t n, char **out);

/**
 * nu_prime of the n-th (a, b) Lucas term through the closed formula
 * (no term is materialized). Output contract matches `psq_valuation`.
 *
 * # Safety
 * `nu` and `infinite` must be writable.
 */
enum PsqStatus psq_lucas_valuation(int64_t a,
                                   int64_t b,
                                   uint64_t prime,
                                   uint64_t n,
                                   uint64_t *nu,
                                   int32_t *infinite);

/**
 * Classifies nu, L or ell of a polynomial tuple over base b.
 *
 * `target` is "valuation", "lastnonzero" or "digits"; `d` is the digit
 * width for "digits" and ignored otherwise. `poly` uses '|' to separate
 * components, one per prime factor of b (one component total is used for
 * every factor). On success `*kind` names the class and `*parameter` holds
 * its period or k as a decimal string, empty when the class has none; both
 * are new strings.
 *
 * # Safety
 * `target` and `poly` must be NUL-terminated strings; `kind` and
 * `parameter` writable for one pointer each.
 */
enum PsqStatus psq_classify(uint64_t b,
                            const char *target,
                            uint32_t d,
                            const char *poly,
                            char **kind,
                            char **parameter);

/**
 * Classifies which (a, b) Lucas terms are not sums of three squares and
 * verifies the report against exact terms up to `verify_bound`.
 *
 * # Safety
 * `out` must be writable for one pointer.
 */
enum PsqStatus psq_three_squares(int64_t a,
                                 int64_t b,
                                 uint64_t verify_bound,
                                 struct PsqThreeSquares **out);

/**
 * Releases a three-squares report. NULL is ignored.
 *
 * # Safety
 * `report` must be NULL or an unfreed handle from `psq_three_squares`.
 */
void psq_three_squares_free(struct PsqThreeSquares *report);

/**
 * The index multiplier pi of a report; 0 for NULL.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
uint64_t psq_three_squares_pi(const struct PsqThreeSquares *report);

/**
 * How many exceptional progressions and families a report lists.
 *
 * # Safety
 * `report` must be a live handle; `progressions` and `families` writable.
 */
enum PsqStatus psq_three_squares_counts(const struct PsqThreeSquares *report,
                                        uintptr_t *progressions,
                                        uintptr_t *families);

/**
 * The i-th exceptional progression: indices n = residue mod (pi * 2^t).
 *
 * # Safety
 * `report` must be a live handle; `t` and `residue` writable.
 */
enum PsqStatus psq_three_squares_progression(const struct PsqThreeSquares *report,
                                             uintptr_t i,
                                             uint32_t *t,
                                             uint64_t *residue);

/**
 * The i-th exceptional family: indices n = pi * 2^t * 4^k * (8 l + c).
 *
 * # Safety
 * `report` must be a live handle; `t` and `c` writable.
 */
enum PsqStatus psq_three_squares_family(const struct PsqThreeSquares *report,
                                        uintptr_t i,
                                        uint32_t *t,
                                        uint8_t *c);

/**
 * Whether index n is in the report's exceptional set: 1 yes, 0 no,
 * -1 for a NULL report.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
int32_t psq_three_squares_contains(const struct PsqThreeSquares *report, uint64_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PADISEQ_H */
