#ifndef DGELASTO_H
#define DGELASTO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum DgeStatus {
  DGE_STATUS_OK = 0,
  DGE_STATUS_NULL_POINTER = 1,
  DGE_STATUS_INVALID_UTF8 = 2,
  DGE_STATUS_CONFIG = 3,
  DGE_STATUS_INVALID_ARGUMENT = 4,
  DGE_STATUS_SOLVER = 5,
  DGE_STATUS_IO = 6,
  /**
   * The requested value does not exist for this run (no exact solution).
   */
  DGE_STATUS_NOT_AVAILABLE = 7,
  DGE_STATUS_PANIC = 8,
} DgeStatus;

/**
 * A validated run configuration.
 */
typedef struct DgeConfig DgeConfig;

/**
 * A finished run with its summary.
 */
typedef struct DgeRun DgeRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and validates a JSON run configuration.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum DgeStatus dge_config_from_json(const char *json, struct DgeConfig **out);

/**
 * Replaces the output directory of `config`.
 *
 * # Safety
 * `config` must come from [`dge_config_from_json`]; `dir` must be nul-terminated.
 */
enum DgeStatus dge_config_set_output_dir(struct DgeConfig *config, const char *dir);

/**
 * The configuration as JSON; free the result with [`dge_string_free`].
 *
 * # Safety
 * `config` must come from [`dge_config_from_json`]; `out` must be valid.
 */
enum DgeStatus dge_config_to_json(const struct DgeConfig *config, char **out);

/**
 * # Safety
 * `config` must come from [`dge_config_from_json`] or be null; it must not be used afterwards.
 */
void dge_config_free(struct DgeConfig *config);

/**
 * Solves `config` and writes its artifacts to the configured output directory.
 *
 * # Safety
 * `config` must come from [`dge_config_from_json`]; `out` must be valid.
 */
enum DgeStatus dge_run(const struct DgeConfig *config, struct DgeRun **out);

/**
 * `max_t 𝕳_R` over every time level.
 *
 * # Safety
 * `run` must come from [`dge_run`]; `out` must be valid.
 */
enum DgeStatus dge_run_max_indicator(const struct DgeRun *run, double *out);

/**
 * `max_t e_R`; [`DgeStatus::NotAvailable`] without an exact solution.
 *
 * # Safety
 * `run` must come from [`dge_run`]; `out` must be valid.
 */
enum DgeStatus dge_run_max_error(const struct DgeRun *run, double *out);

/**
 * The run summary as JSON; free the result with [`dge_string_free`].
 *
 * # Safety
 * `run` must come from [`dge_run`]; `out` must be valid.
 */
enum DgeStatus dge_run_summary_json(const struct DgeRun *run, char **out);

/**
 * # Safety
 * `run` must come from [`dge_run`] or be null; it must not be used afterwards.
 */
void dge_run_free(struct DgeRun *run);

/**
 * Writes the `len - 1` experimental orders of convergence of `values` over
 * mesh widths `widths` into `out`.
 *
 * # Safety
 * `values` and `widths` must hold `len` doubles, `out` room for `len - 1`.
 */
enum DgeStatus dge_eoc(const double *values, const double *widths, uintptr_t len, double *out);

/**
 * Message of the last failed call on this thread, or null. Borrowed: valid
 * until the next call on this thread.
 */
const char *dge_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library or be null; it must not be used afterwards.
 */
void dge_string_free(char *s);

/**
 * Library version, a static string.
 */
const char *dge_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DGELASTO_H */
