#ifndef SLITWALK_H
#define SLITWALK_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Built-in coin selector for [`sw_walk_new`].
 */
typedef enum {
  SW_COIN_HADAMARD = 0,
  SW_COIN_GROVER = 1,
  SW_COIN_FOURIER = 2,
} SwCoin;

/**
 * Status codes returned by every fallible function.
 */
typedef enum {
  SW_OK = 0,
  SW_NULL_POINTER = 1,
  SW_INVALID_ARGUMENT = 2,
  SW_CONFIG_ERROR = 3,
  SW_RUNTIME_ERROR = 4,
  SW_IO_ERROR = 5,
  SW_BUFFER_TOO_SMALL = 6,
  SW_PANIC = 7,
} SwStatus;

/**
 * Experiment configuration handle.
 */
typedef struct SwConfig SwConfig;

/**
 * Finished experiment handle.
 */
typedef struct SwResult SwResult;

/**
 * Step-by-step walk handle.
 */
typedef struct SwWalk SwWalk;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *sw_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sw_version(void);

/**
 * Create a config from a preset name such as `"fig5_double"`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
SwStatus sw_config_from_preset(const char *name, SwConfig **out);

/**
 * Parse config text in the CLI file format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
SwStatus sw_config_parse(const char *text, SwConfig **out);

/**
 * Number of time steps in a config.
 *
 * # Safety
 * `config` must be a live handle and `out` a writable pointer.
 */
SwStatus sw_config_steps(const SwConfig *config, uintptr_t *out);

/**
 * # Safety
 * `config` must be NULL or a handle not yet freed.
 */
void sw_config_free(SwConfig *config);

/**
 * Run a config to completion.
 *
 * # Safety
 * `config` must be a live handle and `out` a writable pointer.
 */
SwStatus sw_run(const SwConfig *config, SwResult **out);

/**
 * Final-time probability at site `(m, n)`; zero outside the box or on odd sites.
 *
 * # Safety
 * `result` must be a live handle and `out` a writable pointer.
 */
SwStatus sw_result_probability(const SwResult *result, int32_t m, int32_t n, double *out);

/**
 * Largest `|norm - 1|` seen during the run.
 *
 * # Safety
 * `result` must be a live handle and `out` a writable pointer.
 */
SwStatus sw_result_norm_deviation(const SwResult *result, double *out);

/**
 * Copy the analysed screen profile into caller buffers.
 *
 * `len` receives the profile length. Passing `capacity` 0 with NULL buffers
 * queries the length. A run without a screen has length 0.
 *
 * # Safety
 * `slots` and `values` must each hold `capacity` elements (or be NULL when
 * `capacity` is 0); `len` must be writable.
 */
SwStatus sw_result_screen_profile(const SwResult *result,
                                  int32_t *slots,
                                  double *values,
                                  uintptr_t capacity,
                                  uintptr_t *len);

/**
 * Number of accepted maxima and minima on the screen (both 0 without a screen).
 *
 * # Safety
 * `result` must be a live handle; `maxima` and `minima` must be writable.
 */
SwStatus sw_result_extrema_counts(const SwResult *result, uintptr_t *maxima, uintptr_t *minima);

/**
 * Write `field.csv`, `screen.csv`, `extrema.json` and `manifest.json` into `dir`.
 *
 * # Safety
 * `result` must be a live handle and `dir` a NUL-terminated path.
 */
SwStatus sw_result_write(const SwResult *result, const char *dir);

/**
 * # Safety
 * `result` must be NULL or a handle not yet freed.
 */
void sw_result_free(SwResult *result);

/**
 * Create a walk at the origin in a box of half-width `radius`.
 *
 * `state` holds 8 doubles: re/im pairs for coins `(0,0), (0,1), (1,0), (1,1)`.
 *
 * # Safety
 * `state` must point to 8 doubles and `out` must be writable.
 */
SwStatus sw_walk_new(SwCoin coin, uintptr_t radius, const double *state, SwWalk **out);

/**
 * Break the edge from `(m, n)` toward coin direction `(j, k)`.
 *
 * # Safety
 * `walk` must be a live handle.
 */
SwStatus sw_walk_break_edge(SwWalk *walk, int32_t m, int32_t n, uint8_t j, uint8_t k);

/**
 * Advance the walk by `steps` steps.
 *
 * # Safety
 * `walk` must be a live handle.
 */
SwStatus sw_walk_step(SwWalk *walk, uintptr_t steps);

/**
 * Current time, total probability, and the probability at `(m, n)`.
 *
 * # Safety
 * `walk` must be a live handle; each output pointer may be NULL to skip it.
 */
SwStatus sw_walk_query(const SwWalk *walk,
                       int32_t m,
                       int32_t n,
                       uintptr_t *time,
                       double *norm,
                       double *probability);

/**
 * # Safety
 * `walk` must be NULL or a handle not yet freed.
 */
void sw_walk_free(SwWalk *walk);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SLITWALK_H */
