#ifndef TORSION_FORGE_H
#define TORSION_FORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TfStatus {
  TF_STATUS_OK = 0,
  TF_STATUS_NULL_POINTER = 1,
  TF_STATUS_INVALID_ARGUMENT = 2,
  TF_STATUS_INADMISSIBLE = 3,
  TF_STATUS_BUDGET_EXCEEDED = 4,
  TF_STATUS_ASSERTION_FAILED = 5,
  TF_STATUS_PANIC = 6,
} TfStatus;

// A reduced divisor class on some [`TfModel`].
typedef struct TfDivisor TfDivisor;

// A curve `y^2 = F(x)` with odd-degree squarefree `F`.
typedef struct TfModel TfModel;

// Result of a rank computation.
typedef struct TfRankReport TfRankReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *tf_version(void);

// Message for the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *tf_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void tf_string_free(char *s);

// `#C(F_{p^(2s)})` for `y^2 = x^(p^(2m)) - x`, as a decimal string.
// A `budget` of 0 means the environment or built-in default.
//
// # Safety
// `out` must be valid for one pointer write.
enum TfStatus tf_count_points(uint64_t p, uint64_t m, uint64_t s, uint64_t budget, char **out);

// Rank of the `ell`-torsion of the Jacobian of `y^2 = x^(p^(2m)) - x` over
// `F_{p^2}`; an interval when exact counting is over budget.
//
// # Safety
// `out` must be valid for one pointer write.
enum TfStatus tf_rank_new(uint64_t p,
                          uint64_t ell,
                          uint64_t m,
                          uint64_t budget,
                          struct TfRankReport **out);

// # Safety
// `r` must be a live report handle.
bool tf_rank_is_exact(const struct TfRankReport *r);

// The exact rank as a decimal string; `TF_STATUS_INVALID_ARGUMENT` for an
// interval report.
//
// # Safety
// `r` must be a live report handle and `out` valid for one pointer write.
enum TfStatus tf_rank_value(const struct TfRankReport *r, char **out);

// Bracket `lo <= rank <= hi` as decimal strings; equal ends for exact reports.
//
// # Safety
// `r` must be a live report handle; `lo` and `hi` valid for one pointer write.
enum TfStatus tf_rank_interval(const struct TfRankReport *r, char **lo, char **hi);

// # Safety
// `r` must be NULL or a report handle not yet freed.
void tf_rank_free(struct TfRankReport *r);

// `y^2 = x^q - x` over `F_{p^n}`.
//
// # Safety
// `out` must be valid for one pointer write.
enum TfStatus tf_model_new_artin_schreier(uint64_t p, size_t n, size_t q, struct TfModel **out);

// `y^2 = c h(x)` over `F_{p^n}`, with `h` given by `len` prime-field
// coefficients, lowest degree first.
//
// # Safety
// `coeffs` must point to `len` readable values; `out` valid for one pointer write.
enum TfStatus tf_model_new_prime_coeffs(uint64_t p,
                                        size_t n,
                                        const uint64_t *coeffs,
                                        size_t len,
                                        uint64_t c,
                                        struct TfModel **out);

// Genus, or 0 for NULL.
//
// # Safety
// `m` must be NULL or a live model handle.
size_t tf_model_genus(const struct TfModel *m);

// # Safety
// `m` must be NULL or a model handle not yet freed. Divisors created on it
// must not be used with any other model afterwards.
void tf_model_free(struct TfModel *m);

// The neutral class.
//
// # Safety
// `m` must be a live model handle and `out` valid for one pointer write.
enum TfStatus tf_divisor_identity(const struct TfModel *m, struct TfDivisor **out);

// A seeded random class; the same seed gives the same class.
//
// # Safety
// `m` must be a live model handle and `out` valid for one pointer write.
enum TfStatus tf_divisor_random(const struct TfModel *m, uint64_t seed, struct TfDivisor **out);

// `a + b`.
//
// # Safety
// All handles must be live, `a` and `b` on model `m`; `out` valid for one pointer write.
enum TfStatus tf_divisor_add(const struct TfModel *m,
                             const struct TfDivisor *a,
                             const struct TfDivisor *b,
                             struct TfDivisor **out);

// `-a`.
//
// # Safety
// As for [`tf_divisor_add`].
enum TfStatus tf_divisor_negate(const struct TfModel *m,
                                const struct TfDivisor *a,
                                struct TfDivisor **out);

// `n a` with `n` a non-negative decimal string.
//
// # Safety
// As for [`tf_divisor_add`]; `n` must be a NUL-terminated string.
enum TfStatus tf_divisor_scalar_mul(const struct TfModel *m,
                                    const char *n,
                                    const struct TfDivisor *a,
                                    struct TfDivisor **out);

// # Safety
// `d` must be NULL or a live divisor handle.
bool tf_divisor_is_identity(const struct TfDivisor *d);

// Equality of reduced representatives; false if either is NULL.
//
// # Safety
// `a` and `b` must be NULL or live divisor handles.
bool tf_divisor_equal(const struct TfDivisor *a, const struct TfDivisor *b);

// `deg u`, or 0 for NULL.
//
// # Safety
// `d` must be NULL or a live divisor handle.
size_t tf_divisor_weight(const struct TfDivisor *d);

// # Safety
// `d` must be NULL or a divisor handle not yet freed.
void tf_divisor_free(struct TfDivisor *d);

// Run a command-line invocation (without the program name) and return the
// rendered report. `exit_code` receives the code the command-line tool would
// exit with. `--out` is ignored.
//
// # Safety
// `argv` must point to `argc` NUL-terminated strings; `out` and `exit_code`
// must be valid for one write each.
enum TfStatus tf_run(const char *const *argv, size_t argc, char **out, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORSION_FORGE_H */
