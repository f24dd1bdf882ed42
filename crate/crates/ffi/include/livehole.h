#ifndef LIVEHOLE_H
#define LIVEHOLE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Set on [`lh_program_load`] to read free variables as holes.
#define LH_FREE_VARS_AS_HOLES 1

typedef enum LhOutcome {
  LH_OUTCOME_BOXED = 0,
  LH_OUTCOME_INDET = 1,
  LH_OUTCOME_FUEL_EXHAUSTED = 2,
} LhOutcome;

typedef enum LhStatus {
  LH_STATUS_OK = 0,
  LH_STATUS_NULL_ARGUMENT = 1,
  LH_STATUS_INVALID_UTF8 = 2,
  // Parse or type error.
  LH_STATUS_STATIC_ERROR = 3,
  LH_STATUS_OVERFLOW = 4,
  // The program has not been evaluated yet.
  LH_STATUS_NOT_EVALUATED = 5,
  LH_STATUS_UNKNOWN_HOLE = 6,
  // The fragment does not fit the hole.
  LH_STATUS_FILL_REJECTED = 7,
  // A bug in the engine.
  LH_STATUS_INTERNAL = 8,
} LhStatus;

// An elaborated program, and its latest evaluation if any.
typedef struct LhProgram LhProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *lh_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void lh_string_free(char *s);

// Parse and elaborate `source`. Diagnostics end up in [`lh_last_error`].
//
// # Safety
// `source` must be a NUL-terminated string and `out` a valid pointer.
enum LhStatus lh_program_load(const char *source, uint32_t flags, struct LhProgram **out);

// # Safety
// `p` must be null or a handle from this library, not yet freed.
void lh_program_free(struct LhProgram *p);

// The program's type.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
enum LhStatus lh_program_type(struct LhProgram *p, char **out);

// The elaborated program, then one line per hole.
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
enum LhStatus lh_program_elaborated(struct LhProgram *p, char **out);

// Source text of the program (after any fills).
//
// # Safety
// `p` must be a live handle and `out` a valid pointer.
enum LhStatus lh_program_source(struct LhProgram *p, char **out);

// Evaluate with at most `fuel` steps and keep the result on the handle.
// Any out-pointer may be null.
//
// # Safety
// `p` must be a live handle; non-null out-pointers must be valid.
enum LhStatus lh_program_eval(struct LhProgram *p,
                              uint64_t fuel,
                              char **result,
                              enum LhOutcome *outcome,
                              uint64_t *steps);

// Number of closures of `hole` in the latest result.
//
// # Safety
// `p` must be a live handle, `hole` a NUL-terminated string and `count` a
// valid pointer.
enum LhStatus lh_program_closure_count(struct LhProgram *p, const char *hole, uint64_t *count);

// Fill `hole` in the evaluated result with `fragment` and resume for at
// most `fuel` steps. The filled program is a new handle; `p` is unchanged.
//
// # Safety
// `p` must be a live handle, strings NUL-terminated, `out` valid, and other
// out-pointers null or valid.
enum LhStatus lh_program_fill(struct LhProgram *p,
                              const char *hole,
                              const char *fragment,
                              uint64_t fuel,
                              struct LhProgram **out,
                              char **result,
                              enum LhOutcome *outcome,
                              uint64_t *steps);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LIVEHOLE_H */
