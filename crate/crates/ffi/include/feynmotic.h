#ifndef FEYNMOTIC_H
#define FEYNMOTIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Which graph polynomial [`fm_graph_polynomial`] returns.
 */
typedef enum FmPolynomial {
  FM_POLYNOMIAL_PSI = 0,
  FM_POLYNOMIAL_PHI = 1,
  FM_POLYNOMIAL_XI = 2,
} FmPolynomial;

/**
 * Status codes.  The nonzero library codes coincide with the exit codes of
 * the command-line tool.
 */
typedef enum FmStatus {
  FM_STATUS_OK = 0,
  /**
   * Any other library error.
   */
  FM_STATUS_ERROR = 1,
  /**
   * Malformed input or invalid graph.
   */
  FM_STATUS_PARSE = 2,
  /**
   * A mathematical precondition is violated (divergent, non-generic, …).
   */
  FM_STATUS_PRECONDITION = 3,
  /**
   * The numerical budget was exhausted.
   */
  FM_STATUS_BUDGET = 4,
  /**
   * A required pointer argument was null.
   */
  FM_STATUS_NULL_ARGUMENT = 10,
  /**
   * A string argument was not valid UTF-8.
   */
  FM_STATUS_INVALID_UTF8 = 11,
  /**
   * An internal panic was caught.
   */
  FM_STATUS_INTERNAL = 12,
} FmStatus;

/**
 * Opaque graph handle.
 */
typedef struct FmGraph FmGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread (empty after a
 * success).  The pointer stays valid until the next call on this thread.
 */
const char *fm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fm_version(void);

/**
 * Parses a graph in the text or JSON format.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FmStatus fm_graph_parse(const char *text, struct FmGraph **out);

/**
 * Releases a graph handle (null is ignored).
 *
 * # Safety
 * `g` must come from [`fm_graph_parse`] and not have been freed.
 */
void fm_graph_free(struct FmGraph *g);

/**
 * Releases a string returned by this library (null is ignored).
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fm_string_free(char *s);

/**
 * Number of edges and loop number of a graph.
 *
 * # Safety
 * `g` must be a live handle; the out-pointers must be valid.
 */
enum FmStatus fm_graph_shape(const struct FmGraph *g, size_t *n_edges, size_t *loops);

/**
 * Canonical text of `Ψ`, `Φ` or `Ξ`.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer; free the result with
 * [`fm_string_free`].
 */
enum FmStatus fm_graph_polynomial(const struct FmGraph *g, enum FmPolynomial which, char **out);

/**
 * Convergence in dimension `d`.  `witness` receives the edge bitmask of the
 * lexicographically least offending subgraph (bit `e−1` for edge `e`), or 0.
 *
 * # Safety
 * `g` must be a live handle; the out-pointers must be valid.
 */
enum FmStatus fm_graph_is_convergent(const struct FmGraph *g,
                                     uint32_t d,
                                     bool *convergent,
                                     uint64_t *witness);

/**
 * Runs a command-line invocation.  `argv` holds `argc` arguments *without*
 * the program name.  The JSON report is written to `out_json` and the
 * command's exit code to `exit_code`; the status is `FM_STATUS_OK` whenever
 * the command ran, whatever its exit code.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; the out-pointers must
 * be valid.  Free the report with [`fm_string_free`].
 */
enum FmStatus fm_run(size_t argc, const char *const *argv, char **out_json, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEYNMOTIC_H */
