#ifndef OPCONE_H
#define OPCONE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OpconeStatus {
  OPCONE_STATUS_OK = 0,
  OPCONE_STATUS_INPUT_ERROR = 1,
  OPCONE_STATUS_AUDIT_FAIL = 2,
  OPCONE_STATUS_UNPHYSICAL_SETUP = 3,
  OPCONE_STATUS_NULL_POINTER = 4,
  OPCONE_STATUS_INVALID_UTF8 = 5,
  OPCONE_STATUS_OUT_OF_RANGE = 6,
  OPCONE_STATUS_PANIC = 7,
} OpconeStatus;

/**
 * A normalized probability table.
 */
typedef struct OpconeTable OpconeTable;

/**
 * A parsed and validated theory.
 */
typedef struct OpconeTheory OpconeTheory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *opcone_last_error(void);

/**
 * Library version as a static string.
 */
const char *opcone_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a string obtained from this library, not yet freed.
 */
void opcone_string_free(char *s);

/**
 * Parses a theory document. `origin` names the source in error messages.
 *
 * # Safety
 * `text` and `origin` must be valid NUL-terminated strings; `out` must be
 * writable.
 */
enum OpconeStatus opcone_theory_parse(const char *text,
                                      const char *origin,
                                      struct OpconeTheory **out);

/**
 * # Safety
 * `theory` must be null or a handle from [`opcone_theory_parse`], not yet freed.
 */
void opcone_theory_free(struct OpconeTheory *theory);

/**
 * Evaluates the theory's network.
 *
 * # Safety
 * `theory` must be a live handle; `out` must be writable.
 */
enum OpconeStatus opcone_evaluate(const struct OpconeTheory *theory, struct OpconeTable **out);

/**
 * # Safety
 * `table` must be null or a handle from [`opcone_evaluate`], not yet freed.
 */
void opcone_table_free(struct OpconeTable *table);

/**
 * Number of rows; 0 for a null handle.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t opcone_table_len(const struct OpconeTable *table);

/**
 * Normalized probability of row `index`.
 *
 * # Safety
 * `table` must be a live handle; `out` must be writable.
 */
enum OpconeStatus opcone_table_probability(const struct OpconeTable *table,
                                           size_t index,
                                           double *out);

/**
 * Raw probability weight of row `index`.
 *
 * # Safety
 * `table` must be a live handle; `out` must be writable.
 */
enum OpconeStatus opcone_table_weight(const struct OpconeTable *table, size_t index, double *out);

/**
 * Outcome labels of row `index`, comma separated.
 *
 * # Safety
 * `table` must be a live handle; `out` must be writable. The string must be
 * released with [`opcone_string_free`].
 */
enum OpconeStatus opcone_table_outcome(const struct OpconeTable *table, size_t index, char **out);

/**
 * The whole table as JSON.
 *
 * # Safety
 * `table` must be a live handle; `out` must be writable.
 */
enum OpconeStatus opcone_table_json(const struct OpconeTable *table, char **out);

/**
 * Runs the audits named in the comma-separated `postulates` and writes the
 * reports as JSON. Returns [`OpconeStatus::AuditFail`] (with the reports
 * still written) when any verdict is a failure.
 *
 * # Safety
 * `theory` must be a live handle, `postulates` a valid string and `out`
 * writable.
 */
enum OpconeStatus opcone_audit_json(const struct OpconeTheory *theory,
                                    const char *postulates,
                                    uint64_t seed,
                                    char **out);

/**
 * Success probability of the bundled indefinite-order game.
 *
 * # Safety
 * `out` must be writable.
 */
enum OpconeStatus opcone_ocb_success(double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPCONE_H */
