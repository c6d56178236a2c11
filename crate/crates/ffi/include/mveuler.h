#ifndef MVEULER_H
#define MVEULER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call; the values match the command-line exit codes.
 */
typedef enum {
  MVE_STATUS_OK = 0,
  /**
   * A checked property failed (axiom harness, or the methods disagree).
   */
  MVE_STATUS_PROPERTY_FAILURE = 1,
  /**
   * Unparsable formula or point, bad dimension or method, invalid UTF-8.
   */
  MVE_STATUS_INVALID_INPUT = 2,
  /**
   * A blow-up or reduction cap was hit.
   */
  MVE_STATUS_RESOURCE_CAP = 3,
  /**
   * The theory has no models; any report produced carries `E = 0`.
   */
  MVE_STATUS_INCONSISTENT_THEORY = 4,
  MVE_STATUS_NULL_POINTER = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  MVE_STATUS_INTERNAL = 6,
} MveStatus;

/**
 * Values accepted by the `method` parameters.
 */
typedef enum {
  MVE_METHOD_GEOMETRIC = 0,
  MVE_METHOD_RECURSIVE = 1,
  MVE_METHOD_BOTH = 2,
  /**
   * Both methods up to 64 distinct hats, geometric beyond.
   */
  MVE_METHOD_AUTO = 3,
} MveMethod;

/**
 * Opaque parsed formula.
 */
typedef struct MveFormula MveFormula;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mve_version(void);

/**
 * Message for the last failed call on this thread, or null.
 */
const char *mve_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void mve_string_free(char *s);

/**
 * Parses `text` into a new handle stored in `*out`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
MveStatus mve_formula_parse(const char *text, MveFormula **out);

/**
 * # Safety
 * `f` must be null or a handle from [`mve_formula_parse`], not yet freed.
 */
void mve_formula_free(MveFormula *f);

/**
 * Canonical text of a formula.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
MveStatus mve_formula_to_string(const MveFormula *f, char **out);

/**
 * Value of `f` at `point`, given as comma-separated exact fractions such
 * as `"3/4,1/2"`, written to `*out` as a reduced fraction.
 *
 * # Safety
 * `f` must be a live handle, `point` a NUL-terminated string, `out` writable.
 */
MveStatus mve_formula_eval(const MveFormula *f, const char *point, char **out);

/**
 * `E(phi)` in the algebra presented by `theory` (null for the free
 * algebra) over `[0,1]^dim`; `dim = 0` infers it from the formulas.
 * `method` is an [`MveMethod`] value. An inconsistent theory writes 0 and
 * returns `MVE_STATUS_INCONSISTENT_THEORY`.
 *
 * # Safety
 * `phi` must be a live handle, `theory` null or a live handle, `out_e`
 * writable.
 */
MveStatus mve_euler(const MveFormula *phi,
                    const MveFormula *theory,
                    size_t dim,
                    int method,
                    int64_t *out_e);

/**
 * As [`mve_euler`], writing the full valuation report as JSON to `*out`.
 * The report is also written for an inconsistent theory.
 *
 * # Safety
 * As for [`mve_euler`]; `out` must be writable.
 */
MveStatus mve_report_json(const MveFormula *phi,
                          const MveFormula *theory,
                          size_t dim,
                          int method,
                          char **out);

/**
 * JSON of the triangulation linearizing `phi` (restricted to `oneset(theory)`
 * when `theory` is not null).
 *
 * # Safety
 * As for [`mve_report_json`].
 */
MveStatus mve_triangulation_json(const MveFormula *phi,
                                 const MveFormula *theory,
                                 size_t dim,
                                 char **out);

/**
 * Runs the seeded axiom harness and writes its JSON summary to `*out`.
 * Returns `MVE_STATUS_PROPERTY_FAILURE` if any trial fails.
 *
 * # Safety
 * `out` must be writable.
 */
MveStatus mve_check_axioms(size_t trials,
                           size_t vars,
                           size_t max_depth,
                           size_t max_size,
                           uint64_t seed,
                           char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MVEULER_H */
