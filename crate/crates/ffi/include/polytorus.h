/*
 * Every fallible call returns a PtStatus. On anything but PT_STATUS_OK the
 * out parameters are untouched and pt_last_error_message() describes the
 * failure on the calling thread.
 */

#ifndef POLYTORUS_H
#define POLYTORUS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PtStatus {
  PT_STATUS_OK = 0,
  PT_STATUS_NULL_POINTER = 1,
  PT_STATUS_INVALID_UTF8 = 2,
  PT_STATUS_INVALID_ARGUMENT = 3,
  PT_STATUS_PARSE = 4,
  PT_STATUS_NOT_CONVERGED = 5,
  PT_STATUS_IO = 6,
  PT_STATUS_PANIC = 7,
} PtStatus;

typedef enum PtMethod {
  PT_METHOD_EXACT_PARSEVAL = 0,
  PT_METHOD_EXACT_EVEN_CONVOLUTION = 1,
  PT_METHOD_EXACT_ROOTS = 2,
  PT_METHOD_QUADRATURE = 3,
  PT_METHOD_ITERATED_MIXED = 4,
  PT_METHOD_MONTE_CARLO = 5,
} PtMethod;

/**
 * Opaque polynomial handle. Free with [`pt_polynomial_free`].
 */
typedef struct PtPolynomial PtPolynomial;

typedef struct PtNormResult {
  double value;
  double error_estimate;
  enum PtMethod method;
  bool converged;
  /**
   * Grid nodes where `|P|` fell below the log clamp.
   */
  size_t clamped_nodes;
  bool near_unit_roots;
} PtNormResult;

typedef struct PtLambda {
  double gamma_form;
  double integral_form;
  double consistency_gap;
} PtLambda;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pt_version(void);

/**
 * Message for the last failed call on this thread, or NULL after a
 * success. The pointer stays valid until the next call on the same thread.
 */
const char *pt_last_error_message(void);

/**
 * Parses a polynomial from its JSON interchange form.
 *
 * # Safety
 * `json` must be NULL or a NUL-terminated string; `out` must be NULL or
 * point to writable storage for one pointer.
 */
enum PtStatus pt_polynomial_from_json(const char *json, struct PtPolynomial **out);

/**
 * Builds a polynomial in `n` variables from `count` terms. Term `i` has
 * exponents `exponents[i*n .. i*n+n]` and coefficient `re[i] + i·im[i]`;
 * `im` may be NULL for real coefficients.
 *
 * # Safety
 * `exponents` must hold `count * n` values and `re` (and `im` unless NULL)
 * `count` values; `out` must point to writable storage for one pointer.
 */
enum PtStatus pt_polynomial_from_terms(size_t n,
                                       size_t count,
                                       const uint32_t *exponents,
                                       const double *re,
                                       const double *im,
                                       struct PtPolynomial **out);

/**
 * Releases a handle. NULL is ignored.
 *
 * # Safety
 * `poly` must be NULL or a handle from this library that was not freed yet.
 */
void pt_polynomial_free(struct PtPolynomial *poly);

/**
 * Variable count, number of nonzero terms and total degree.
 *
 * # Safety
 * `poly` must be a live handle; each out pointer must be NULL or writable.
 */
enum PtStatus pt_polynomial_shape(const struct PtPolynomial *poly,
                                  size_t *n_vars,
                                  size_t *n_terms,
                                  uint32_t *total_degree);

/**
 * Evaluates at the point `(re[j] + i·im[j])_j` of length `n`.
 *
 * # Safety
 * `re` and `im` must hold `n` values; `out_re` and `out_im` must be writable.
 */
enum PtStatus pt_polynomial_evaluate(const struct PtPolynomial *poly,
                                     size_t n,
                                     const double *re,
                                     const double *im,
                                     double *out_re,
                                     double *out_im);

/**
 * Serializes to JSON. Release the string with [`pt_string_free`].
 *
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum PtStatus pt_polynomial_to_json(const struct PtPolynomial *poly, char **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string from this library that was not freed yet.
 */
void pt_string_free(char *s);

/**
 * `‖P‖_p`. A `rel_tol` of zero or less keeps the default tolerance.
 *
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum PtStatus pt_lp_norm(const struct PtPolynomial *poly,
                         double p,
                         double rel_tol,
                         struct PtNormResult *out);

/**
 * Mahler measure.
 *
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum PtStatus pt_mahler_measure(const struct PtPolynomial *poly, struct PtNormResult *out);

/**
 * Luxemburg norm for `ψ(t) = exp(t^alpha) − 1`.
 *
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum PtStatus pt_orlicz_norm(const struct PtPolynomial *poly,
                             double alpha,
                             struct PtNormResult *out);

/**
 * Arestov's constant `Λ(p, m)` in Gamma and integral form.
 *
 * # Safety
 * `out` must be writable.
 */
enum PtStatus pt_arestov_lambda(double p, uint32_t m, struct PtLambda *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYTORUS_H */
