#ifndef ITU_H
#define ITU_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum ItuStatus {
  /**
   * Success, or an affirmative answer.
   */
  ITU_STATUS_OK = 0,
  /**
   * A negative answer (not a subtype, unsatisfied, no strategy, no
   * solution found).
   */
  ITU_STATUS_NO = 1,
  /**
   * Malformed input text.
   */
  ITU_STATUS_PARSE_ERROR = 2,
  /**
   * A null pointer, invalid UTF-8 or an out-of-range argument.
   */
  ITU_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The operation was refused or failed on well-formed input.
   */
  ITU_STATUS_FAILED = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  ITU_STATUS_PANIC = 5,
} ItuStatus;

/**
 * Constraint system variant for the tiling reduction.
 */
typedef enum ItuVariant {
  /**
   * Uses `omega` wildcards.
   */
  ITU_VARIANT_STANDARD = 0,
  /**
   * Uses no `omega`.
   */
  ITU_VARIANT_OMEGA_FREE = 1,
} ItuVariant;

/**
 * A list of `<=` / `==` constraints.
 */
typedef struct ItuConstraints ItuConstraints;

/**
 * A substitution of types for variables.
 */
typedef struct ItuSubstitution ItuSubstitution;

/**
 * A spiral tiling system.
 */
typedef struct ItuTiling ItuTiling;

/**
 * An intersection type.
 */
typedef struct ItuType ItuType;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *itu_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void itu_string_free(char *s);

/**
 * Releases a type. Null is ignored.
 *
 * # Safety
 * The handle must come from this library and not have been freed.
 */
void itu_type_free(struct ItuType *h);

/**
 * Text form of a type, or null for a null handle.
 *
 * # Safety
 * The handle must be valid or null.
 */
char *itu_type_to_string(const struct ItuType *h);

/**
 * Releases a constraint set. Null is ignored.
 *
 * # Safety
 * The handle must come from this library and not have been freed.
 */
void itu_constraints_free(struct ItuConstraints *h);

/**
 * Text form of a constraint set, or null for a null handle.
 *
 * # Safety
 * The handle must be valid or null.
 */
char *itu_constraints_to_string(const struct ItuConstraints *h);

/**
 * Releases a substitution. Null is ignored.
 *
 * # Safety
 * The handle must come from this library and not have been freed.
 */
void itu_substitution_free(struct ItuSubstitution *h);

/**
 * Text form of a substitution, or null for a null handle.
 *
 * # Safety
 * The handle must be valid or null.
 */
char *itu_substitution_to_string(const struct ItuSubstitution *h);

/**
 * Releases a tiling system. Null is ignored.
 *
 * # Safety
 * The handle must come from this library and not have been freed.
 */
void itu_tiling_free(struct ItuTiling *h);

/**
 * Text form of a tiling system, or null for a null handle.
 *
 * # Safety
 * The handle must be valid or null.
 */
char *itu_tiling_to_string(const struct ItuTiling *h);

/**
 * Parses a type such as `(a -> b) & 'x`.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ItuStatus itu_type_parse(const char *src, struct ItuType **out);

/**
 * `Ok` when `lhs <= rhs`, `No` otherwise.
 *
 * # Safety
 * Both handles must be valid.
 */
enum ItuStatus itu_subtype(const struct ItuType *lhs, const struct ItuType *rhs);

/**
 * `Ok` when the types are equal, `No` otherwise.
 *
 * # Safety
 * Both handles must be valid.
 */
enum ItuStatus itu_type_equal(const struct ItuType *lhs, const struct ItuType *rhs);

/**
 * Stores the organized form of `t` in `out`.
 *
 * # Safety
 * `t` must be valid and `out` writable.
 */
enum ItuStatus itu_type_organize(const struct ItuType *t, struct ItuType **out);

/**
 * Parses constraint lines `TYPE <= TYPE` / `TYPE == TYPE`.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ItuStatus itu_constraints_parse(const char *src, struct ItuConstraints **out);

/**
 * Parses substitution lines `'name := TYPE`.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ItuStatus itu_substitution_parse(const char *src, struct ItuSubstitution **out);

/**
 * `Ok` when `s` satisfies every constraint, `No` otherwise.
 *
 * # Safety
 * Both handles must be valid.
 */
enum ItuStatus itu_verify(const struct ItuConstraints *cs, const struct ItuSubstitution *s);

/**
 * Searches for a rank 1 solution within the budget. Stores it and returns
 * `Ok`, or returns `No` when none is found.
 *
 * # Safety
 * `cs` must be valid and `out` writable.
 */
enum ItuStatus itu_rank1_solve(const struct ItuConstraints *cs,
                               uintptr_t max_card,
                               uintptr_t max_depth,
                               struct ItuSubstitution **out);

/**
 * Parses a tiling system (`tiles:`, `h:`, `v:`, `bottom:`, `top:` lines).
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ItuStatus itu_tiling_parse(const char *src, struct ItuTiling **out);

/**
 * Solves the spiral game. `horizon` 0 selects the default bound. On `Ok`,
 * `added` (if not null) receives the worst-case number of added tiles.
 *
 * # Safety
 * `t` must be valid; `added` must be writable or null.
 */
enum ItuStatus itu_tiling_solve(const struct ItuTiling *t, uintptr_t horizon, uintptr_t *added);

/**
 * Builds the constraint system of a tiling system.
 *
 * # Safety
 * `t` must be valid and `out` writable.
 */
enum ItuStatus itu_tiling_reduce(const struct ItuTiling *t,
                                 enum ItuVariant variant,
                                 struct ItuConstraints **out);

/**
 * Solves the game and compiles the strategy into a solution of the
 * constraint system. `max_length` 0 keeps the default size limits.
 * Returns `No` when Constructor has no winning strategy.
 *
 * # Safety
 * `t` must be valid and `out` writable.
 */
enum ItuStatus itu_tiling_compile(const struct ItuTiling *t,
                                  enum ItuVariant variant,
                                  uintptr_t max_length,
                                  struct ItuSubstitution **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ITU_H */
