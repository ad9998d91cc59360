#ifndef JORDANLAB_H
#define JORDANLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum JlClosureKind {
  /**
   * Weisfeiler–Leman (ordinary matrix product).
   */
  JL_CLOSURE_KIND_WL = 0,
  JL_CLOSURE_KIND_JORDAN = 1,
} JlClosureKind;

typedef enum JlStatus {
  JL_STATUS_OK = 0,
  JL_STATUS_NULL_POINTER = 1,
  JL_STATUS_INVALID_UTF8 = 2,
  JL_STATUS_SYNTAX_ERROR = 3,
  JL_STATUS_VALIDATION_ERROR = 4,
  JL_STATUS_LOOP_ERROR = 5,
  JL_STATUS_DOMAIN_ERROR = 6,
  JL_STATUS_OUT_OF_RANGE = 7,
  JL_STATUS_PANIC = 8,
} JlStatus;

/**
 * Opaque loop handle.
 */
typedef struct JlLoop JlLoop;

/**
 * Opaque rainbow handle.
 */
typedef struct JlScheme JlScheme;

typedef struct JlClassification {
  size_t order;
  size_t rank;
  bool homogeneous;
  bool regular;
  bool thin;
  bool symmetric;
  bool is_cc;
  bool is_jc;
  bool is_as;
  bool is_js;
  /**
   * `rank / order` in lowest terms.
   */
  uint64_t ratio_numerator;
  uint64_t ratio_denominator;
} JlClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *jl_last_error_message(void);

/**
 * Parses a scheme file (native or list-of-lists syntax).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum JlStatus jl_scheme_parse(const char *text, struct JlScheme **out);

/**
 * # Safety
 * `scheme` must be null or a handle from this library, not yet freed.
 */
void jl_scheme_free(struct JlScheme *scheme);

/**
 * # Safety
 * `scheme` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_scheme_order(const struct JlScheme *scheme, size_t *out);

/**
 * # Safety
 * `scheme` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_scheme_rank(const struct JlScheme *scheme, size_t *out);

/**
 * Color of the cell `(a, b)`.
 *
 * # Safety
 * `scheme` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_scheme_color(const struct JlScheme *scheme, size_t a, size_t b, size_t *out);

/**
 * # Safety
 * `scheme` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_scheme_classify(const struct JlScheme *scheme, struct JlClassification *out);

/**
 * Closure of a rainbow; the result is a new handle.
 *
 * # Safety
 * `scheme` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_scheme_closure(const struct JlScheme *scheme,
                                enum JlClosureKind kind,
                                struct JlScheme **out);

/**
 * Merges every class with its transpose; the result is a new handle.
 *
 * # Safety
 * `scheme` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_scheme_symmetrize(const struct JlScheme *scheme, struct JlScheme **out);

/**
 * Canonical native serialization; free the result with [`jl_string_free`].
 *
 * # Safety
 * `scheme` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_scheme_serialize(const struct JlScheme *scheme, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void jl_string_free(char *s);

/**
 * Parses a loop file; the identity is moved to element 0 if needed.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum JlStatus jl_loop_parse(const char *text, struct JlLoop **out);

/**
 * # Safety
 * `l` must be null or a handle from this library, not yet freed.
 */
void jl_loop_free(struct JlLoop *l);

/**
 * # Safety
 * `l` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_loop_order(const struct JlLoop *l, size_t *out);

/**
 * Whether the loop satisfies the RA conditions.
 *
 * # Safety
 * `l` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_loop_is_ra(const struct JlLoop *l, bool *out);

/**
 * The left translations of a loop as a thin Jordan scheme, or
 * `DomainError` when they do not form one.
 *
 * # Safety
 * `l` must be a live handle and `out` a valid pointer.
 */
enum JlStatus jl_loop_scheme(const struct JlLoop *l, struct JlScheme **out);

/**
 * `J(Z_n)`, the non-regular thin Jordan scheme on `2n` points.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum JlStatus jl_construct_jcal_cyclic(size_t n, struct JlScheme **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JORDANLAB_H */
