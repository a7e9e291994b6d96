#ifndef CBOUND_H
#define CBOUND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CbStatus {
  CB_STATUS_OK = 0,
  /**
   * A null pointer, bad UTF-8 or out-of-range index.
   */
  CB_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Rejected parameters or configuration.
   */
  CB_STATUS_CONFIG = 2,
  /**
   * The computation failed numerically.
   */
  CB_STATUS_NUMERICAL = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  CB_STATUS_INTERNAL = 4,
} CbStatus;

/**
 * Solver method selector for [`CbSolveOptions`].
 */
typedef enum CbMethod {
  CB_METHOD_AUTO = 0,
  CB_METHOD_TRANSFER = 1,
  CB_METHOD_SHOOTING = 2,
} CbMethod;

typedef struct CbPotential CbPotential;

typedef struct CbResult CbResult;

/**
 * Options for [`cb_solve`]. NaN fields mean "use the default".
 */
typedef struct CbSolveOptions {
  enum CbMethod method;
  double window_lo;
  double window_hi;
  double x_trunc;
  double step;
  double reality_accept;
  double reality_warn;
  double residual_tol;
  /**
   * Global phase applied to every state (radians).
   */
  double phase;
} CbSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cb_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cb_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void cb_string_free(char *s);

/**
 * Potential from a JSON spec document (`{"family": ..., "params": {...}}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CbStatus cb_potential_from_json(const char *json, struct CbPotential **out);

/**
 * Potential from a catalog preset name such as `"sinusoidal-paper"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum CbStatus cb_potential_preset(const char *name, struct CbPotential **out);

/**
 * `V(x)`.
 *
 * # Safety
 * `p` must be a live handle; `re` and `im` must be writable.
 */
enum CbStatus cb_potential_eval(const struct CbPotential *p, double x, double *re, double *im);

/**
 * # Safety
 * `p` must be null or a handle not freed before.
 */
void cb_potential_free(struct CbPotential *p);

struct CbSolveOptions cb_solve_options_default(void);

/**
 * Bound states of `p`. `opts` may be null for defaults.
 *
 * # Safety
 * `p` must be a live handle, `opts` null or readable, `out` writable.
 */
enum CbStatus cb_solve(const struct CbPotential *p,
                       const struct CbSolveOptions *opts,
                       struct CbResult **out);

/**
 * Darboux partner of the oscillator with states `ψ₀..=ψ_levels` on a
 * symmetric grid of the given half-width and spacing.
 *
 * # Safety
 * `out` must be writable.
 */
enum CbStatus cb_darboux(double c0,
                         double c1,
                         double lambda,
                         size_t levels,
                         double half_width,
                         double step,
                         struct CbResult **out);

/**
 * Number of bound states in `r`, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t cb_result_len(const struct CbResult *r);

/**
 * Energy and residual of state `i`.
 *
 * # Safety
 * `r` must be a live handle; `energy` writable; `residual` null or writable.
 */
enum CbStatus cb_result_energy(const struct CbResult *r,
                               size_t i,
                               double *energy,
                               double *residual);

/**
 * Number of grid points of state `i`.
 *
 * # Safety
 * `r` must be a live handle; `n` writable.
 */
enum CbStatus cb_result_state_len(const struct CbResult *r, size_t i, size_t *n);

/**
 * Copies the samples of state `i` into caller buffers of length `n`, which
 * must equal [`cb_result_state_len`]. Any buffer may be null to skip it.
 *
 * # Safety
 * Non-null buffers must hold `n` doubles.
 */
enum CbStatus cb_result_state_copy(const struct CbResult *r,
                                   size_t i,
                                   double *x,
                                   double *re,
                                   double *im,
                                   size_t n);

/**
 * Zero counts of `e^{iθ}ψ_i` and whether its zeros interlace.
 *
 * # Safety
 * `r` must be a live handle; out pointers writable.
 */
enum CbStatus cb_result_zero_counts(const struct CbResult *r,
                                    size_t i,
                                    double theta,
                                    size_t *n_r,
                                    size_t *n_i,
                                    int *interlaced);

/**
 * The result as a versioned JSON document; free with [`cb_string_free`].
 *
 * # Safety
 * `r` must be a live handle; `out` writable.
 */
enum CbStatus cb_result_to_json(const struct CbResult *r, char **out);

/**
 * # Safety
 * `r` must be null or a handle not freed before.
 */
void cb_result_free(struct CbResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CBOUND_H */
