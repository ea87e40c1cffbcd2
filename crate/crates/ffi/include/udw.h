#ifndef UDW_H
#define UDW_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UdwStatus {
  UDW_STATUS_OK = 0,
  UDW_STATUS_NULL_POINTER = 1,
  UDW_STATUS_INVALID_ARGUMENT = 2,
  UDW_STATUS_PARSE_ERROR = 3,
  UDW_STATUS_NONCONVERGED = 4,
  UDW_STATUS_NONPERTURBATIVE = 5,
  UDW_STATUS_UNSUPPORTED = 6,
  UDW_STATUS_PANIC = 7,
} UdwStatus;

typedef enum UdwModel {
  UDW_MODEL_LINEAR = 0,
  UDW_MODEL_QUADRATIC_REAL = 1,
  UDW_MODEL_QUADRATIC_COMPLEX = 2,
  UDW_MODEL_BILINEAR = 3,
} UdwModel;

/**
 * Opaque scenario handle.
 */
typedef struct UdwScenario UdwScenario;

typedef struct UdwComplex {
  double re;
  double im;
} UdwComplex;

/**
 * Element values with their error estimates.
 */
typedef struct UdwElements {
  double l_aa;
  double l_aa_err;
  double l_bb;
  double l_bb_err;
  struct UdwComplex l_ab;
  double l_ab_err;
  struct UdwComplex m;
  double m_err;
  /**
   * 1 if every element met its tolerance.
   */
  int32_t converged;
} UdwElements;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL.
 * Valid until the next call into this library from the same thread.
 */
const char *udw_last_error(void);

/**
 * Reference scenario with the quadratic real model. Free with `udw_scenario_free`.
 */
struct UdwScenario *udw_scenario_default(void);

/**
 * Reference geometry with the given model; `n` is read for bilinear only.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum UdwStatus udw_scenario_reference(enum UdwModel model, uint32_t n, struct UdwScenario **out);

/**
 * Parse a TOML scenario.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum UdwStatus udw_scenario_from_toml(const char *text, struct UdwScenario **out);

/**
 * # Safety
 * `scenario` must come from this library and not be freed twice. NULL is ignored.
 */
void udw_scenario_free(struct UdwScenario *scenario);

/**
 * Replace the regulator. Rejected (and left unchanged) unless positive and finite.
 *
 * # Safety
 * `scenario` must be a live handle.
 */
enum UdwStatus udw_scenario_set_epsilon(struct UdwScenario *scenario, double epsilon);

/**
 * Compute all four elements. On `UDW_STATUS_NONCONVERGED` the values are still written.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum UdwStatus udw_compute_elements(const struct UdwScenario *scenario, struct UdwElements *out);

/**
 * W_ε(Δt, r).
 *
 * # Safety
 * `out` must be writable.
 */
enum UdwStatus udw_wightman_eval(double dt, double r, double epsilon, struct UdwComplex *out);

/**
 * Closed-form negativity of the assembled state.
 *
 * # Safety
 * `elements` must be readable; `out` must be writable.
 */
enum UdwStatus udw_negativity(const struct UdwElements *elements, double *out);

/**
 * Closed-form mutual information of the assembled state.
 *
 * # Safety
 * `elements` must be readable; `out` must be writable.
 */
enum UdwStatus udw_mutual_information(const struct UdwElements *elements, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UDW_H */
