#ifndef POLYA_MST_H
#define POLYA_MST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PolyaStatus {
  POLYA_STATUS_OK = 0,
  // A required pointer argument was null.
  POLYA_STATUS_NULL_POINTER = 1,
  // Bad model name, arity, functional or other input.
  POLYA_STATUS_INVALID_ARGUMENT = 2,
  // A size cap was exceeded.
  POLYA_STATUS_SIZE = 3,
  // A ledger entry did not reproduce.
  POLYA_STATUS_VERIFICATION = 4,
  // The urn is not in the normal regime, so there is no covariance.
  POLYA_STATUS_NOT_NORMAL = 5,
  // The value exists only in floating point.
  POLYA_STATUS_NOT_EXACT = 6,
  // A string argument was not UTF-8.
  POLYA_STATUS_UTF8 = 7,
  // Internal failure, including caught panics.
  POLYA_STATUS_INTERNAL = 8,
} PolyaStatus;

// The limit law `(μ, Σ)` of a model.
typedef struct PolyaLaw PolyaLaw;

// An urn model together with its named functionals.
typedef struct PolyaModel PolyaModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *polya_last_error(void);

// Builds `kind` ("protected", "nodes", "leaves" or "one-protected") at arity `m`.
//
// # Safety
// `kind` must be a NUL-terminated string and `out` a valid pointer.
enum PolyaStatus polya_model_new(const char *kind, uint32_t m, struct PolyaModel **out);

// Number of ball types, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t polya_model_types(const struct PolyaModel *model);

// # Safety
// `model` must be null or a handle not yet freed.
void polya_model_free(struct PolyaModel *model);

// Computes the limit law. Fails with `NotNormal` outside the normal regime.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum PolyaStatus polya_law_new(const struct PolyaModel *model, struct PolyaLaw **out);

// # Safety
// `law` must be null or a handle not yet freed.
void polya_law_free(struct PolyaLaw *law);

// Per-key mean and variance of the named functional, as doubles.
//
// # Safety
// `law` must be a live handle, `name` a NUL-terminated string, and
// `mean`, `variance` valid pointers.
enum PolyaStatus polya_law_functional(const struct PolyaLaw *law,
                                      const char *name,
                                      double *mean,
                                      double *variance);

// Exact per-key mean and variance as `"p/q"` strings, released with
// [`polya_string_free`]. Fails with `NotExact` when the covariance was
// computed in floating point.
//
// # Safety
// As for [`polya_law_functional`]; `mean` and `variance` receive owned strings.
enum PolyaStatus polya_law_functional_exact(const struct PolyaLaw *law,
                                            const char *name,
                                            char **mean,
                                            char **variance);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void polya_string_free(char *s);

// Monte Carlo over random `m`-ary search trees with `n` keys: sample mean
// and unbiased variance of `stat` ("two_protected", "one_protected",
// "leaves" or "internal") over `trials` seeded trials.
//
// # Safety
// `stat` must be a NUL-terminated string and `mean`, `variance` valid pointers.
enum PolyaStatus polya_simulate(uint32_t m,
                                uint64_t n,
                                uint64_t trials,
                                uint64_t seed,
                                const char *stat,
                                double *mean,
                                double *variance);

// Runs the exact-value ledger. Returns `Verification` if any entry fails.
//
// # Safety
// `passed` and `total` must be valid pointers.
enum PolyaStatus polya_verify(size_t *passed, size_t *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYA_MST_H */
