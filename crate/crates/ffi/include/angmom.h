#ifndef ANGMOM_H
#define ANGMOM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum AmStatus {
  AM_STATUS_OK = 0,
  AM_STATUS_NULL_POINTER = 1,
  AM_STATUS_INVALID_ARGUMENT = 2,
  AM_STATUS_CONFIG = 3,
  AM_STATUS_WRAP = 4,
  AM_STATUS_ZERO_PROBABILITY = 5,
  AM_STATUS_IO = 6,
  /**
   * The call succeeded but a checked invariant failed.
   */
  AM_STATUS_INVARIANT_VIOLATION = 7,
  AM_STATUS_PANIC = 8,
} AmStatus;

typedef enum AmLabel {
  AM_LABEL_SYSTEM = 0,
  AM_LABEL_PREPARER = 1,
  AM_LABEL_GRAND_PREPARER = 2,
  AM_LABEL_METER = 3,
} AmLabel;

/**
 * Opaque joint state.
 */
typedef struct AmState AmState;

/**
 * Opaque single-mode wavefunction.
 */
typedef struct AmWavefunction AmWavefunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Free with
 * [`am_string_free`].
 */
char *am_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void am_string_free(char *s);

/**
 * The eigenstate `|l>` on a lattice of size `dim`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum AmStatus am_wavefunction_basis(int64_t dim, int64_t l, struct AmWavefunction **out);

/**
 * Equal amplitudes on `lo..=hi`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum AmStatus am_wavefunction_uniform(int64_t dim,
                                      int64_t lo,
                                      int64_t hi,
                                      struct AmWavefunction **out);

/**
 * Normalized superposition of `len` terms `(ls[i], re[i] + i im[i])`.
 * `im` may be null for real amplitudes.
 *
 * # Safety
 * `ls` and `re` (and `im` if non-null) must point to `len` elements; `out`
 * must be valid for writes.
 */
enum AmStatus am_wavefunction_from_terms(int64_t dim,
                                         const int64_t *ls,
                                         const double *re,
                                         const double *im,
                                         size_t len,
                                         struct AmWavefunction **out);

/**
 * # Safety
 * `w` must be a live handle.
 */
size_t am_wavefunction_dim(const struct AmWavefunction *w);

/**
 * Amplitude at `l` (reduced modulo the lattice size).
 *
 * # Safety
 * `w` must be a live handle; `re` and `im` valid for writes.
 */
enum AmStatus am_wavefunction_amp(const struct AmWavefunction *w,
                                  int64_t l,
                                  double *re,
                                  double *im);

/**
 * # Safety
 * `w` must be null or a handle not yet freed.
 */
void am_wavefunction_free(struct AmWavefunction *w);

/**
 * Product state of `n` labeled wavefunctions.
 *
 * # Safety
 * `labels` and `parts` must point to `n` elements; `out` valid for writes.
 */
enum AmStatus am_state_product(const enum AmLabel *labels,
                               const struct AmWavefunction *const *parts,
                               size_t n,
                               struct AmState **out);

/**
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void am_state_free(struct AmState *s);

/**
 * Shift-prepare `target` from `source` into `profile`. Wrapping is an error.
 *
 * # Safety
 * Handles must be live; `out` valid for writes.
 */
enum AmStatus am_state_shift_prepare(const struct AmState *s,
                                     enum AmLabel source,
                                     enum AmLabel target,
                                     const struct AmWavefunction *profile,
                                     struct AmState **out);

/**
 * Copy the momentum of `source` into the pointer `meter`.
 *
 * # Safety
 * `s` must be live; `out` valid for writes.
 */
enum AmStatus am_state_pointer_couple(const struct AmState *s,
                                      enum AmLabel source,
                                      enum AmLabel meter,
                                      struct AmState **out);

/**
 * # Safety
 * `s` must be live; `out` valid for writes.
 */
enum AmStatus am_state_swap(const struct AmState *s,
                            enum AmLabel a,
                            enum AmLabel b,
                            struct AmState **out);

/**
 * Entanglement entropy in bits of `label` with the rest of the state.
 *
 * # Safety
 * `s` must be live; `out` valid for writes.
 */
enum AmStatus am_state_entropy(const struct AmState *s, enum AmLabel label, double *out);

/**
 * Probability that the total momentum over the `n` scope labels equals
 * `total`.
 *
 * # Safety
 * `s` must be live; `scope` must point to `n` labels; `out` valid for writes.
 */
enum AmStatus am_state_total_probability(const struct AmState *s,
                                         const enum AmLabel *scope,
                                         size_t n,
                                         int64_t total,
                                         double *out);

/**
 * Run a TOML scenario and return its JSON report in `out_json`. Returns
 * [`AmStatus::InvariantViolation`] (with the report still written) when a
 * checked invariant fails.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out_json` valid for writes.
 */
enum AmStatus am_run_scenario(const char *toml, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANGMOM_H */
