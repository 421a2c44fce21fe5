#ifndef RELSTANDBY_H
#define RELSTANDBY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RelstandbyPath {
  RELSTANDBY_PATH_CLOSED_FORM = 0,
  RELSTANDBY_PATH_QUADRATURE = 1,
  RELSTANDBY_PATH_FACTORED_QUADRATURE = 2,
  RELSTANDBY_PATH_MONTE_CARLO = 3,
} RelstandbyPath;

typedef enum RelstandbyStatus {
  RELSTANDBY_STATUS_OK = 0,
  RELSTANDBY_STATUS_NULL_POINTER = 1,
  RELSTANDBY_STATUS_INVALID_ARGUMENT = 2,
  RELSTANDBY_STATUS_CONFIG = 3,
  RELSTANDBY_STATUS_DOMAIN = 4,
  RELSTANDBY_STATUS_UNSUPPORTED = 5,
  RELSTANDBY_STATUS_NON_CONVERGENCE = 6,
  RELSTANDBY_STATUS_VALIDITY = 7,
  RELSTANDBY_STATUS_NULL_CONDITIONING = 8,
  RELSTANDBY_STATUS_SIMULATION = 9,
  RELSTANDBY_STATUS_PANIC = 10,
} RelstandbyStatus;

/**
 * Opaque system handle.
 */
typedef struct RelstandbySystem RelstandbySystem;

typedef struct RelstandbyEstimate {
  double value;
  double error_bound;
  enum RelstandbyPath path;
} RelstandbyEstimate;

typedef struct RelstandbyCostRates {
  double unit_cost;
  struct RelstandbyEstimate mttf_bare;
  struct RelstandbyEstimate mttf_standby;
  double cost_rate_bare;
  double cost_rate_standby;
} RelstandbyCostRates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a system from a JSON run configuration. On success `*out` holds
 * a handle to release with [`relstandby_system_free`].
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RelstandbyStatus relstandby_system_from_json(const char *json, struct RelstandbySystem **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `system` must come from [`relstandby_system_from_json`] and not be used
 * afterwards.
 */
void relstandby_system_free(struct RelstandbySystem *system);

/**
 * `P(Z_{n-k+1:n} > s)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RelstandbyStatus relstandby_survival_bare(const struct RelstandbySystem *system,
                                               double s,
                                               struct RelstandbyEstimate *out);

/**
 * `P(T > s)`, raw (unclamped).
 *
 * # Safety
 * Pointers must be valid.
 */
enum RelstandbyStatus relstandby_survival_standby(const struct RelstandbySystem *system,
                                                  double s,
                                                  struct RelstandbyEstimate *out);

/**
 * Mean time to failure; `with_standby` selects `T` over the bare system.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RelstandbyStatus relstandby_mttf(const struct RelstandbySystem *system,
                                      bool with_standby,
                                      struct RelstandbyEstimate *out);

/**
 * Mean residual life at `t`. `kind` 1 conditions on the system being
 * alive, 2 on the k-out-of-n part, 3 on every component.
 *
 * # Safety
 * Pointers must be valid.
 */
enum RelstandbyStatus relstandby_psi(const struct RelstandbySystem *system,
                                     uint32_t kind,
                                     double t,
                                     struct RelstandbyEstimate *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum RelstandbyStatus relstandby_cost_rates(const struct RelstandbySystem *system,
                                            double unit_cost,
                                            struct RelstandbyCostRates *out);

/**
 * Copula validity report as a JSON object. Free the string with
 * [`relstandby_string_free`].
 *
 * # Safety
 * Pointers must be valid.
 */
enum RelstandbyStatus relstandby_validate_json(const struct RelstandbySystem *system, char **out);

/**
 * Monte Carlo estimates for the JSON array of targets `targets_json`
 * (for example `[{"kind":"mttf"},{"kind":"psi3_at","at":[0.5]}]`),
 * returned as JSON. Free the string with [`relstandby_string_free`].
 *
 * # Safety
 * Pointers must be valid; `targets_json` NUL-terminated.
 */
enum RelstandbyStatus relstandby_simulate_json(const struct RelstandbySystem *system,
                                               const char *targets_json,
                                               uint64_t count,
                                               uint64_t seed,
                                               char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void relstandby_string_free(char *s);

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call on the same thread.
 */
const char *relstandby_last_error(void);

/**
 * Library version, static storage.
 */
const char *relstandby_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELSTANDBY_H */
