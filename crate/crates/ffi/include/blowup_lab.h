#ifndef BLOWUP_LAB_H
#define BLOWUP_LAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_ARGUMENT = 2,
  BL_STATUS_CONFIG = 3,
  BL_STATUS_NO_CONVERGENCE = 4,
  BL_STATUS_OUTSIDE_PATCH = 5,
  BL_STATUS_NUMERICAL = 6,
  BL_STATUS_IO = 7,
  BL_STATUS_PANIC = 8,
} BlStatus;

/**
 * Blowup construction parameters bound to a field.
 */
typedef struct BlBlowup BlBlowup;

/**
 * Free wave V = (v₁, v₂) in eleven dimensions.
 */
typedef struct BlField BlField;

/**
 * mantissa · N₀^(q_num/q_den). `log10` is filled on output and ignored on input.
 */
typedef struct BlScaled {
  double mantissa;
  int64_t q_num;
  int64_t q_den;
  double log10;
} BlScaled;

typedef struct BlExponentLedger {
  int64_t d;
  int64_t alpha_num;
  int64_t alpha_den;
  int64_t discriminant_num;
  int64_t discriminant_den;
  int64_t step_num;
  int64_t step_den;
  bool feasible;
} BlExponentLedger;

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t bl_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bl_version(void);

/**
 * Builds the standard k = 5 free wave.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_field_new(struct BlField **out);

/**
 * # Safety
 * `field` must come from `bl_field_new` and not be used afterwards.
 */
void bl_field_free(struct BlField *field);

/**
 * V(t, r) into `out[0..2]`.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for two doubles.
 */
enum BlStatus bl_field_value(const struct BlField *field, double t, double r, double *out);

/**
 * Cone half-width ε of the free wave.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum BlStatus bl_field_epsilon(const struct BlField *field, double *out);

/**
 * Construction with cutoff width `delta`, base `n0` and scales up to `i_max`.
 * The handle keeps its own reference to the field.
 *
 * # Safety
 * `field` must be a live handle and `out` valid for writes.
 */
enum BlStatus bl_blowup_new(const struct BlField *field,
                            double delta,
                            double n0,
                            size_t i_max,
                            struct BlBlowup **out);

/**
 * # Safety
 * `h` must come from `bl_blowup_new` and not be used afterwards.
 */
void bl_blowup_free(struct BlBlowup *h);

/**
 * U(t, y) summed over scales, y = |x|². Components go to `out[0..2]`.
 *
 * # Safety
 * `h` must be a live handle, `t` and `y` readable, `out` valid for two values.
 */
enum BlStatus bl_blowup_eval(const struct BlBlowup *h,
                             const struct BlScaled *t,
                             const struct BlScaled *y,
                             struct BlScaled *out);

/**
 * |U(δ/N_j, 0)| / N_j^{3/2} for j = 1..=j_max into `out[0..j_max]`.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for `j_max` doubles.
 */
enum BlStatus bl_blowup_amplitude(const struct BlBlowup *h, size_t j_max, double *out);

/**
 * Exact ansatz ledger for dimension `d`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_ansatz_feasibility(int64_t d, struct BlExponentLedger *out);

/**
 * c(p) for d = 9 or 10; `corrected` selects the 8/p reading of the d = 10 first branch.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BlStatus bl_c_of_p(int64_t d, double p, bool corrected, double *out);

/**
 * Runs a `verify` subcommand ("freewave", "blowup", "numerology",
 * "regularity", "all") with an optional JSON config file, writing artifacts
 * under `out_dir`. `pass` receives the overall verdict.
 *
 * # Safety
 * `command` and `out_dir` must be NUL-terminated strings, `config_path`
 * null or NUL-terminated, `pass` valid for writes.
 */
enum BlStatus bl_run(const char *command, const char *config_path, const char *out_dir, bool *pass);

#endif /* BLOWUP_LAB_H */
