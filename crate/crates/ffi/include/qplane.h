#ifndef QPLANE_H
#define QPLANE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// How `q` is treated.
typedef enum QpMode {
  // `q = j`.
  QP_MODE_SPECIALIZED = 0,
  // `q` a free Laurent variable.
  QP_MODE_SYMBOLIC = 1,
} QpMode;

// Result codes.
typedef enum QpStatus {
  QP_STATUS_OK = 0,
  QP_STATUS_NULL_ARGUMENT = 1,
  QP_STATUS_INVALID_UTF8 = 2,
  QP_STATUS_PARSE_ERROR = 3,
  QP_STATUS_ALGEBRA_ERROR = 4,
  QP_STATUS_UNSUPPORTED = 5,
  // A verification report contains failing items; its JSON is still returned.
  QP_STATUS_VERIFICATION_FAILED = 6,
  QP_STATUS_PANIC = 7,
} QpStatus;

// Opaque engine handle.
typedef struct QpEngine QpEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates an engine. Release with [`qp_engine_free`].
struct QpEngine *qp_engine_new(enum QpMode mode);

// # Safety
// `engine` must come from [`qp_engine_new`] and not be used afterwards.
void qp_engine_free(struct QpEngine *engine);

// Normal form of an element or tensor, rewritten in the system matching its
// alphabet.
//
// # Safety
// Pointers must be valid; `expr` NUL-terminated.
enum QpStatus qp_normalize(const struct QpEngine *engine, const char *expr, char **out);

// `d^times(expr)` in normal form.
//
// # Safety
// Pointers must be valid; `expr` NUL-terminated.
enum QpStatus qp_differential(const struct QpEngine *engine,
                              const char *expr,
                              uint32_t times,
                              char **out);

// Applies an operator composition such as `"X*H"` to a coordinate polynomial.
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum QpStatus qp_act(const struct QpEngine *engine, const char *op, const char *expr, char **out);

// The pairing `<u, f>` rendered as a scalar.
//
// # Safety
// Pointers must be valid; strings NUL-terminated.
enum QpStatus qp_pair(const struct QpEngine *engine, const char *u, const char *f, char **out);

// Runs a verification suite and writes its JSON report. Returns
// `VERIFICATION_FAILED` (with the report still written) when any item fails.
//
// # Safety
// Pointers must be valid; `suite` NUL-terminated.
enum QpStatus qp_verify(const struct QpEngine *engine,
                        const char *suite,
                        uint32_t max_degree,
                        uint32_t window,
                        uint64_t seed,
                        char **out_json);

// Message for the last failure on this thread. Valid until the next call
// that fails on the same thread; never free it.
const char *qp_last_error(void);

// Releases a string returned through an `out` parameter.
//
// # Safety
// `s` must come from this library, or be null.
void qp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QPLANE_H */
