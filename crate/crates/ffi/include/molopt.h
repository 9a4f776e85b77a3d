#ifndef MOLOPT_H
#define MOLOPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum MoloptStatus {
  MOLOPT_STATUS_OK = 0,
  MOLOPT_STATUS_NULL_POINTER = 1,
  MOLOPT_STATUS_INVALID_UTF8 = 2,
  MOLOPT_STATUS_CONFIG_ERROR = 3,
  MOLOPT_STATUS_INVALID_PARAMS = 4,
  MOLOPT_STATUS_NOT_APPLICABLE = 5,
  MOLOPT_STATUS_DIVERGES = 6,
  MOLOPT_STATUS_POLE_IN_BAND = 7,
  MOLOPT_STATUS_NO_PEAK = 8,
  MOLOPT_STATUS_NUMERIC_FAILURE = 9,
  MOLOPT_STATUS_PANIC = 10,
} MoloptStatus;

/**
 * Opaque parameter set.
 */
typedef struct MoloptParams MoloptParams;

typedef struct MoloptSteadyState {
  double delta_eff;
  double delta0;
  double a_re;
  double a_im;
  double b_re;
  double b_im;
  double c_re;
  double c_im;
  double ga_re;
  double ga_im;
  double x_b;
  uint32_t branch_id;
  bool converged;
  uint32_t iterations;
  double max_residual;
} MoloptSteadyState;

typedef struct MoloptStability {
  bool stable;
  /**
   * Largest eigenvalue real part, THz.
   */
  double spectral_abscissa;
  /**
   * 0 stable, 1 unstable, 2 borderline.
   */
  int32_t routh;
  bool methods_agree;
} MoloptStability;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON parameter document into a new handle.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum MoloptStatus molopt_params_from_json(const char *json, struct MoloptParams **out);

/**
 * Handle for the built-in reference parameter set.
 *
 * # Safety
 * `out` must be writable.
 */
enum MoloptStatus molopt_params_reference(struct MoloptParams **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `params` must come from this library and not be used afterwards.
 */
void molopt_params_free(struct MoloptParams *params);

/**
 * Default steady state of the handle's parameters.
 *
 * # Safety
 * Pointers must be valid.
 */
enum MoloptStatus molopt_steady_state(const struct MoloptParams *params,
                                      struct MoloptSteadyState *out);

/**
 * Conversion efficiency `T_ac` at probe frequency `omega_ir_thz`.
 * A negative `ga_thz` uses the handle's own coupling.
 *
 * # Safety
 * Pointers must be valid.
 */
enum MoloptStatus molopt_tac(const struct MoloptParams *params,
                             double ga_thz,
                             double omega_ir_thz,
                             double *out);

/**
 * Stability verdict. A negative `ga_thz` uses the handle's own coupling.
 *
 * # Safety
 * Pointers must be valid.
 */
enum MoloptStatus molopt_stability(const struct MoloptParams *params,
                                   double ga_thz,
                                   struct MoloptStability *out);

/**
 * Gain bandwidth (FWHM) in THz. A negative `ga_thz` uses the handle's own coupling.
 *
 * # Safety
 * Pointers must be valid.
 */
enum MoloptStatus molopt_bandwidth(const struct MoloptParams *params, double ga_thz, double *out);

/**
 * Closed-form optimal coupling `|𝒢_a^(*)|` in THz.
 *
 * # Safety
 * Pointers must be valid.
 */
enum MoloptStatus molopt_optimal_coupling(const struct MoloptParams *params, double *out);

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *molopt_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *molopt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOLOPT_H */
