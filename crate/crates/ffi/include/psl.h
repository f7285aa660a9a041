#ifndef PSL_H
#define PSL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  PSL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PSL_STATUS_NULL_POINTER = 1,
  /**
   * Out-of-range parameters or malformed input.
   */
  PSL_STATUS_INPUT = 2,
  /**
   * DIMACS text could not be parsed.
   */
  PSL_STATUS_PARSE = 3,
  /**
   * A component exceeded the exact-search budget.
   */
  PSL_STATUS_BUDGET = 4,
  /**
   * Rejection sampling ran out of attempts.
   */
  PSL_STATUS_EXHAUSTED = 5,
  /**
   * A string argument was not valid UTF-8.
   */
  PSL_STATUS_UTF8 = 6,
  /**
   * The library panicked; the handle arguments should be considered lost.
   */
  PSL_STATUS_PANIC = 7,
} PslStatus;

/**
 * Which test `psl_detect` runs.
 */
typedef enum {
  PSL_TEST_SAT = 0,
  PSL_TEST_LR = 1,
  PSL_TEST_COUPLING = 2,
} PslTest;

/**
 * Opaque formula handle.
 */
typedef struct PslFormula PslFormula;

/**
 * Outcome of `psl_detect`.
 *
 * `t`, `p` and `d` are filled for the coupling test only. `cmp` is the sign
 * of `Z − E[Z]` for the likelihood-ratio test and 0 otherwise.
 */
typedef struct {
  bool decision;
  bool feasible;
  uint64_t t;
  uint64_t p;
  uint64_t d;
  int32_t cmp;
} PslTestResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *psl_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 */
void psl_string_free(char *s);

/**
 * Parses nul-terminated DIMACS text into a new handle.
 */
PslStatus psl_formula_parse(const char *text, PslFormula **out);

/**
 * Releases a handle. Null is ignored.
 */
void psl_formula_free(PslFormula *f);

/**
 * Writes the formula, with its provenance line if any, as DIMACS text.
 */
PslStatus psl_formula_emit(const PslFormula *f, char **out);

/**
 * Number of variables, or 0 for a null handle.
 */
size_t psl_formula_num_vars(const PslFormula *f);

/**
 * Clause width, or 0 for a null handle.
 */
size_t psl_formula_width(const PslFormula *f);

/**
 * Number of clauses, or 0 for a null handle.
 */
size_t psl_formula_num_clauses(const PslFormula *f);

/**
 * Evaluates the formula at `bits[0..len]`, variable 1 first; nonzero bytes are true.
 */
PslStatus psl_formula_eval(const PslFormula *f, const uint8_t *bits, size_t len, bool *out);

/**
 * Samples `m` uniform clauses on ChaCha stream `(seed, stream)`.
 */
PslStatus psl_sample_uniform(uint64_t n,
                             uint64_t k,
                             uint64_t m,
                             uint64_t seed,
                             uint64_t stream,
                             PslFormula **out);

/**
 * Samples a planted-mixture formula. When `planted` is non-null it receives
 * the `n` bytes of the planted assignment, variable 1 first.
 */
PslStatus psl_sample_planted(uint64_t n,
                             uint64_t k,
                             uint64_t m,
                             uint64_t seed,
                             uint64_t stream,
                             PslFormula **out,
                             uint8_t *planted);

/**
 * Exact model count as a decimal string.
 */
PslStatus psl_count_models(const PslFormula *f, uint64_t limit, char **out);

/**
 * `E[Z]` under the uniform law as a reduced fraction of decimal strings.
 */
PslStatus psl_expected_count(uint64_t n, uint64_t k, uint64_t m, char **num, char **den);

/**
 * Runs one test. An infeasible run returns `PSL_STATUS_OK` with `feasible` false.
 */
PslStatus psl_detect(const PslFormula *f, PslTest test, uint64_t limit, PslTestResult *out);

/**
 * Clause-count constant `C` that makes the coupling test's risk at most `delta`.
 */
PslStatus psl_coupling_sample_bound(uint64_t k, double delta, double *out);

/**
 * `2 √(νn) / k`, the clause count below which no test beats risk `1/2 − ν`.
 */
PslStatus psl_lower_bound_m(double nu, uint64_t n, uint64_t k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSL_H */
