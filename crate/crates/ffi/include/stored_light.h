/* C interface to the stored-light simulator. */

#pragma once

/* Generated with cbindgen:0.27.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by fallible functions.
 */
typedef enum SlStatus {
  SL_OK = 0,
  SL_NULL_POINTER = 1,
  SL_INVALID_UTF8 = 2,
  SL_PARSE_ERROR = 3,
  SL_VALIDATION_ERROR = 4,
  SL_SIMULATION_ERROR = 5,
  SL_IO_ERROR = 6,
  SL_PANIC = 7,
} SlStatus;

/**
 * Opaque run configuration.
 */
typedef struct SlConfig SlConfig;

/**
 * Opaque protocol outcome.
 */
typedef struct SlResult SlResult;

/**
 * Scalar diagnostics of a run.
 */
typedef struct SlDiagnostics {
  double max_s_bbprime;
  double polariton_norm_drift;
  double adiabaticity;
  double com_shift;
  double com_shift_predicted;
  double energy_ratio;
  size_t warning_count;
} SlDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *sl_last_error_message(void);

/**
 * Crate version as a static string.
 */
const char *sl_version(void);

/**
 * Parse a TOML run configuration.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum SlStatus sl_config_from_toml(const char *text, struct SlConfig **out);

/**
 * Build one of the named built-in presets.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum SlStatus sl_config_preset(const char *name, struct SlConfig **out);

/**
 * Serialize a configuration back to TOML; the returned string is owned by
 * the caller and released with [`sl_string_free`].
 *
 * # Safety
 * `config` must be a live handle from this library.
 */
char *sl_config_to_toml(const struct SlConfig *config);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void sl_string_free(char *s);

/**
 * Release a configuration handle.
 *
 * # Safety
 * `config` must come from this library and not be freed twice.
 */
void sl_config_free(struct SlConfig *config);

/**
 * Execute the three-stage protocol described by the configuration.
 *
 * # Safety
 * `config` must be a live handle; `out` must be a valid pointer.
 */
enum SlStatus sl_run_protocol(const struct SlConfig *config, struct SlResult **out);

/**
 * Release a result handle.
 *
 * # Safety
 * `result` must come from this library and not be freed twice.
 */
void sl_result_free(struct SlResult *result);

/**
 * Fidelity of the retrieved qubit against the configured target.
 *
 * # Safety
 * `result` must be a live handle; returns a negative value on null.
 */
double sl_result_fidelity(const struct SlResult *result);

/**
 * Retrieved qubit amplitudes in the circular basis.
 *
 * # Safety
 * All pointers must be valid; `result` must be a live handle.
 */
enum SlStatus sl_result_output_qubit(const struct SlResult *result,
                                     double *c_plus_re,
                                     double *c_plus_im,
                                     double *c_minus_re,
                                     double *c_minus_im);

/**
 * Input qubit amplitudes the run started from, in the circular basis.
 *
 * # Safety
 * All pointers must be valid; `result` must be a live handle.
 */
enum SlStatus sl_result_input_qubit(const struct SlResult *result,
                                    double *c_plus_re,
                                    double *c_plus_im,
                                    double *c_minus_re,
                                    double *c_minus_im);

/**
 * Copy out the run diagnostics.
 *
 * # Safety
 * `result` must be a live handle; `out` must be a valid pointer.
 */
enum SlStatus sl_result_diagnostics(const struct SlResult *result, struct SlDiagnostics *out);

/**
 * Run the four-probe reconstruction for the configured protocol and return
 * the fitted gate, row-major (re, im) pairs, plus the fit residual.
 *
 * # Safety
 * `config` must be a live handle; `entries` must point to 8 doubles and
 * `residual` to one.
 */
enum SlStatus sl_reconstruct_gate(const struct SlConfig *config, double *entries, double *residual);

/**
 * Fill `entries` (8 doubles, row-major re/im pairs) with the two-parameter
 * gate matrix at (chi, beta).
 *
 * # Safety
 * `entries` must point to 8 doubles.
 */
enum SlStatus sl_gate_matrix(double chi, double beta, double *entries);

/**
 * Factor a unitary (8 doubles, row-major re/im pairs) into Z-Y-Z pulse
 * parameters: phi1, beta, phi2 and the global phase.
 *
 * # Safety
 * `entries` must point to 8 doubles; the out parameters must be valid.
 */
enum SlStatus sl_synthesize(const double *entries,
                            double *phi1,
                            double *beta,
                            double *phi2,
                            double *global_phase);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
