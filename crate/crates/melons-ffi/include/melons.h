/* C interface to the melons library: exact and asymptotic statistics
 * of nonintersecting path ensembles. Generated from src/lib.rs. */

#ifndef MELONS_FFI_H
#define MELONS_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call; aligned with the CLI exit
 * codes so embedders and scripts see one error contract.
 */
typedef enum MelonStatus {
  /**
   * The call succeeded and all out-parameters are valid.
   */
  MelonStatus_Ok = 0,
  /**
   * A precondition on the inputs was violated (bad handle, range, parse).
   */
  MelonStatus_Usage = 2,
  /**
   * Two routes that must agree exactly did not; always a library bug.
   */
  MelonStatus_Internal = 3,
  /**
   * A numeric routine failed to converge within its budget.
   */
  MelonStatus_Numeric = 4,
} MelonStatus;

/**
 * Opaque evaluation context: working precision, tolerance, and a memoized
 * table of the Dirichlet-series constants shared across calls.
 */
typedef struct MelonContext MelonContext;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an evaluation context with the given working precision in bits
 * (at least 53) and truncation/quadrature tolerance as a decimal string
 * (NULL selects the default "1e-12"). Returns NULL on invalid input, with
 * the detail available from `melon_last_error_message`. Release with
 * `melon_context_free`.
 */
struct MelonContext *melon_context_new(uint32_t precision_bits, const char *tol);

/**
 * Releases a context created by `melon_context_new`. NULL is ignored.
 */
void melon_context_free(struct MelonContext *ctx);

/**
 * Releases any string returned by this library. NULL is ignored.
 */
void melon_string_free(char *s);

/**
 * Returns the failure detail of the most recent call on this thread as a
 * newly allocated string (empty when that call succeeded). The caller
 * releases it with `melon_string_free`.
 */
char *melon_last_error_message(void);

/**
 * Exact number of p-watermelon configurations of half-length n, written to
 * `*out` as a decimal integer string.
 */
enum MelonStatus melon_count(const struct MelonContext *ctx, uint64_t n, uint64_t p, char **out);

/**
 * Exact number of p-watermelon configurations of height at most `h`,
 * written to `*out` as a decimal integer string.
 */
enum MelonStatus melon_count_capped(const struct MelonContext *ctx,
                                    uint64_t n,
                                    uint64_t p,
                                    uint64_t h,
                                    char **out);

/**
 * Exact average height H(n,p) written to `*out` as "numerator/denominator".
 */
enum MelonStatus melon_height_exact(const struct MelonContext *ctx,
                                    uint64_t n,
                                    uint64_t p,
                                    char **out);

/**
 * Exact average height H(n,p) rendered as a decimal string with `digits`
 * significant digits, round-half-even.
 */
enum MelonStatus melon_height_decimal(const struct MelonContext *ctx,
                                      uint64_t n,
                                      uint64_t p,
                                      uint32_t digits,
                                      char **out);

/**
 * Convergence ratio q(n) = H(n,2)/(2.57758·√n − 2), written to `*out` as a
 * double.
 */
enum MelonStatus melon_convergence_ratio(const struct MelonContext *ctx, uint64_t n, double *out);

/**
 * Dirichlet-series expansion constant c_{a,b}, computed by the context's
 * quadrature (memoized per index pair), written to `*out` as a double.
 */
enum MelonStatus melon_dirichlet_constant(const struct MelonContext *ctx,
                                          uint32_t a,
                                          uint32_t b,
                                          double *out);

/**
 * The √(πn)-coefficient K of the two-path average height and K·√π (the
 * display normalization), derived from the context's constants. Both
 * out-parameters are written on success.
 */
enum MelonStatus melon_height_coefficient(const struct MelonContext *ctx,
                                          double *out_k,
                                          double *out_k_sqrt_pi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MELONS_FFI_H */
