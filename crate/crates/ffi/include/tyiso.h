#ifndef TYISO_H
#define TYISO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TyisoStatus {
  TyisoStatus_Ok = 0,
  TyisoStatus_NullArgument = 1,
  TyisoStatus_InvalidUtf8 = 2,
  TyisoStatus_Parse = 3,
  /**
   * Step budget exhausted or a spine too wide to normalise.
   */
  TyisoStatus_Rewrite = 4,
  TyisoStatus_Internal = 5,
} TyisoStatus;

typedef enum TyisoVerdict {
  TyisoVerdict_Isomorphic = 0,
  TyisoVerdict_NotIsomorphic = 1,
  TyisoVerdict_Unknown = 2,
} TyisoVerdict;

/**
 * Opaque type expression.
 */
typedef struct TyisoType TyisoType;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `src` into a new handle stored in `*out`.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TyisoStatus tyiso_parse(const char *src, struct TyisoType **out);

/**
 * # Safety
 * `t` must come from this library and not have been freed. Null is ignored.
 */
void tyiso_free(struct TyisoType *t);

/**
 * Writes the printed form of `t` to `*out` as a new string.
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
enum TyisoStatus tyiso_print(const struct TyisoType *t, char **out);

/**
 * Normalises `t` with the leftmost-outermost strategy and default limits.
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
enum TyisoStatus tyiso_normalize(const struct TyisoType *t, struct TyisoType **out);

/**
 * Decides isomorphism of `a` and `b`.
 *
 * # Safety
 * `a` and `b` must be live handles and `verdict` a valid pointer.
 */
enum TyisoStatus tyiso_isomorphic(const struct TyisoType *a,
                                  const struct TyisoType *b,
                                  enum TyisoVerdict *verdict);

/**
 * # Safety
 * `s` must come from this library and not have been freed. Null is ignored.
 */
void tyiso_string_free(char *s);

/**
 * Static description of a status code. Never null; do not free.
 */
const char *tyiso_status_message(enum TyisoStatus status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TYISO_H */
