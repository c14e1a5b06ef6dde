#ifndef RESUNE_H
#define RESUNE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ResunePrediction {
  RESUNE_PREDICTION_CONFIRMED = 0,
  RESUNE_PREDICTION_VIOLATED = 1,
  RESUNE_PREDICTION_NOT_APPLICABLE = 2,
} ResunePrediction;

typedef enum ResuneStability {
  RESUNE_STABILITY_STABLE = 0,
  RESUNE_STABILITY_UNSTABLE = 1,
  RESUNE_STABILITY_MARGINAL = 2,
} ResuneStability;

typedef enum ResuneStatus {
  RESUNE_STATUS_OK = 0,
  RESUNE_STATUS_NULL_ARGUMENT = 1,
  RESUNE_STATUS_INVALID_UTF8 = 2,
  RESUNE_STATUS_PARSE = 3,
  RESUNE_STATUS_VALIDATION = 4,
  RESUNE_STATUS_DOMAIN = 5,
  RESUNE_STATUS_SOLVER = 6,
  RESUNE_STATUS_SCENARIO = 7,
  RESUNE_STATUS_OUT_OF_RANGE = 8,
  RESUNE_STATUS_INTERNAL = 9,
} ResuneStatus;

/**
 * A validated economy.
 */
typedef struct ResuneEconomy ResuneEconomy;

/**
 * Equilibria found by one scan, ordered by price.
 */
typedef struct ResuneEquilibriumList ResuneEquilibriumList;

/**
 * Price window and grid for the equilibrium scan.
 */
typedef struct ResuneScan {
  double p_min;
  double p_max;
  size_t n_grid;
  bool log_spaced;
  double refine_tol;
} ResuneScan;

typedef struct ResuneEquilibrium {
  double p_star;
  double h_star;
  double sigma_star;
  double excess_residual;
  double slope_direct;
  double slope_indirect;
  double slope_total;
  enum ResuneStability stability;
} ResuneEquilibrium;

typedef struct ResuneHalving {
  struct ResuneEquilibrium pre;
  struct ResuneEquilibrium post;
  double delta_p;
  double delta_h;
  double delta_sigma;
  bool uniqueness_pre;
  bool uniqueness_post;
  enum ResunePrediction prediction;
} ResuneHalving;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *resune_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *resune_version(void);

double resune_std_normal_cdf(double x);

/**
 * Fills `out` with the default scan window.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum ResuneStatus resune_scan_default(struct ResuneScan *out);

/**
 * Parses and validates an economy from its JSON description.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string; `out` must be null or
 * valid for writes.
 */
enum ResuneStatus resune_economy_new(const char *json, struct ResuneEconomy **out);

/**
 * # Safety
 * `economy` must be null or a handle from `resune_economy_new` not yet freed.
 */
void resune_economy_free(struct ResuneEconomy *economy);

/**
 * Excess demand `Z(P)` along the free-entry hash supply.
 *
 * # Safety
 * `economy` must be a live handle or null; `out` must be null or valid for writes.
 */
enum ResuneStatus resune_excess_demand(const struct ResuneEconomy *economy, double p, double *out);

/**
 * Free-entry hash rate at price `p`.
 *
 * # Safety
 * As for `resune_excess_demand`.
 */
enum ResuneStatus resune_hash_supply(const struct ResuneEconomy *economy, double p, double *out);

/**
 * Perceived safety at price `p` and hash rate `h`.
 *
 * # Safety
 * As for `resune_excess_demand`.
 */
enum ResuneStatus resune_safety(const struct ResuneEconomy *economy,
                                double p,
                                double h,
                                double *out);

/**
 * Scans for equilibria. `scan` may be null for the default window.
 *
 * # Safety
 * `economy` must be a live handle; `scan` null or readable; `out` valid for writes.
 */
enum ResuneStatus resune_find_equilibria(const struct ResuneEconomy *economy,
                                         const struct ResuneScan *scan,
                                         struct ResuneEquilibriumList **out);

/**
 * Number of equilibria in `list`; 0 for null.
 *
 * # Safety
 * `list` must be null or a live list handle.
 */
size_t resune_equilibrium_list_len(const struct ResuneEquilibriumList *list);

/**
 * # Safety
 * `list` must be a live list handle; `out` valid for writes.
 */
enum ResuneStatus resune_equilibrium_list_get(const struct ResuneEquilibriumList *list,
                                              size_t index,
                                              struct ResuneEquilibrium *out);

/**
 * # Safety
 * `list` must be null or a handle from `resune_find_equilibria` not yet freed.
 */
void resune_equilibrium_list_free(struct ResuneEquilibriumList *list);

/**
 * Compares equilibria before and after scaling the block subsidy by
 * `factor` (0.5 for a halving). `scan` may be null.
 *
 * # Safety
 * `economy` must be a live handle; `scan` null or readable; `out` valid for writes.
 */
enum ResuneStatus resune_subsidy_shock(const struct ResuneEconomy *economy,
                                       double factor,
                                       const struct ResuneScan *scan,
                                       struct ResuneHalving *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESUNE_H */
