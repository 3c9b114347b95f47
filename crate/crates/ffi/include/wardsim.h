#ifndef WARDSIM_H
#define WARDSIM_H

/* Generated by cbindgen from the wardsim-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum WardsimStatus {
  WARDSIM_STATUS_OK = 0,
  WARDSIM_STATUS_NULL_ARGUMENT = 1,
  WARDSIM_STATUS_INVALID_UTF8 = 2,
  WARDSIM_STATUS_PARSE_ERROR = 3,
  WARDSIM_STATUS_INVALID_CONFIG = 4,
  WARDSIM_STATUS_IO_ERROR = 5,
  WARDSIM_STATUS_RUNTIME_ERROR = 6,
} WardsimStatus;

/**
 * Opaque handle over a loaded fuzzy system.
 */
typedef struct WardsimFls WardsimFls;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Crate version as a static string.
 */
const char *wardsim_version(void);

/**
 * Message for the most recent failure on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *wardsim_last_error(void);

/**
 * Parses a fuzzy system from definition text. On success stores a handle
 * in `out`; release it with `wardsim_fls_free`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WardsimStatus wardsim_fls_parse(const char *text, struct WardsimFls **out);

/**
 * Reads and parses a fuzzy definition file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum WardsimStatus wardsim_fls_load(const char *path, struct WardsimFls **out);

/**
 * Runs one inference. `names`/`values` are parallel arrays of length `n`
 * naming every input variable; the crisp result lands in `out_crisp`.
 *
 * # Safety
 * `fls` must come from `wardsim_fls_parse`/`wardsim_fls_load` and not yet
 * be freed; `names` and `values` must point to `n` valid entries;
 * `out_crisp` must be a valid pointer.
 */
enum WardsimStatus wardsim_fls_infer(const struct WardsimFls *fls,
                                     const char *const *names,
                                     const double *values,
                                     uintptr_t n,
                                     double *out_crisp);

/**
 * Releases a fuzzy system handle. A null handle is a no-op.
 *
 * # Safety
 * `fls` must be null or a handle not yet freed.
 */
void wardsim_fls_free(struct WardsimFls *fls);

/**
 * Runs one simulation from a JSON configuration (same schema as the CLI)
 * and returns the final responses as a JSON string in `out_json` (caller
 * frees with `wardsim_string_free`). Fuzzy file paths in the configuration
 * are resolved relative to the process working directory; absent paths use
 * the embedded defaults.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out_json` a valid
 * pointer.
 */
enum WardsimStatus wardsim_run_json(const char *config_json, uint64_t seed, char **out_json);

/**
 * Releases a string returned by this library. A null pointer is a no-op.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void wardsim_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WARDSIM_H */
