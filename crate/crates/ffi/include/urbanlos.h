#ifndef URBANLOS_H
#define URBANLOS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum UlStatus {
  UL_STATUS_OK = 0,
  UL_STATUS_NULL_POINTER = 1,
  UL_STATUS_DOMAIN = 2,
  UL_STATUS_INFEASIBLE = 3,
  UL_STATUS_DEGENERATE_LINK = 4,
  UL_STATUS_MODEL = 5,
  UL_STATUS_RANK_DEFICIENT = 6,
  UL_STATUS_AGGREGATION = 7,
  UL_STATUS_INVALID_UTF8 = 8,
  UL_STATUS_PANIC = 9,
} UlStatus;

typedef enum UlLinkClass {
  UL_LINK_CLASS_LOS = 0,
  UL_LINK_CLASS_NLOS_BUILDING = 1,
  UL_LINK_CLASS_NLOS_TREE = 2,
  UL_LINK_CLASS_NLOS_STREETLIGHT = 3,
} UlLinkClass;

typedef enum UlScenario {
  UL_SCENARIO_BUILDINGS_ONLY = 0,
  UL_SCENARIO_TREES = 1,
  UL_SCENARIO_FULL = 2,
} UlScenario;

/**
 * Opaque city layout.
 */
typedef struct UlLayout UlLayout;

typedef struct UlGenConfig {
  double area;
  size_t n_trees;
  size_t n_lights;
  size_t n_gu;
  double d_o;
  double h_gu;
  uint64_t seed;
} UlGenConfig;

typedef struct UlVegParams {
  double a;
  double b;
  double c;
  double k0;
  double rf;
  double a0;
  double freq_ghz;
} UlVegParams;

typedef struct UlParams {
  double alpha;
  double beta;
  double gamma;
} UlParams;

typedef struct UlLayoutCounts {
  size_t buildings;
  size_t trees;
  size_t lights;
  size_t users;
} UlLayoutCounts;

typedef struct UlFit {
  double a;
  double b;
  double rmse;
  size_t n_points;
} UlFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ul_last_error(void);

struct UlGenConfig ul_gen_config_default(void);

struct UlVegParams ul_veg_params_default(void);

/**
 * Generates city `city_index` of the family seeded by `config->seed`.
 *
 * # Safety
 * `config` must point to a valid config and `out` to writable storage.
 */
enum UlStatus ul_layout_generate(struct UlParams params,
                                 const struct UlGenConfig *config,
                                 uint64_t city_index,
                                 struct UlLayout **out);

/**
 * # Safety
 * `layout` must be null or a handle from this library, freed at most once.
 */
void ul_layout_free(struct UlLayout *layout);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum UlStatus ul_layout_from_json(const char *json, struct UlLayout **out);

/**
 * Serializes a layout; release the string with [`ul_string_free`].
 *
 * # Safety
 * `layout` must be a live handle and `out` writable.
 */
enum UlStatus ul_layout_to_json(const struct UlLayout *layout, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed at most once.
 */
void ul_string_free(char *s);

/**
 * # Safety
 * `layout` must be a live handle and `out` writable.
 */
enum UlStatus ul_layout_counts(const struct UlLayout *layout, struct UlLayoutCounts *out);

/**
 * Position and height of ground user `index`.
 *
 * # Safety
 * `layout` must be a live handle; `x`, `y` and `h` writable.
 */
enum UlStatus ul_layout_user(const struct UlLayout *layout,
                             size_t index,
                             double *x,
                             double *y,
                             double *h);

/**
 * # Safety
 * `layout` must be a live handle and `out` writable.
 */
enum UlStatus ul_classify_link(const struct UlLayout *layout,
                               double abs_x,
                               double abs_y,
                               double h_abs,
                               double gu_x,
                               double gu_y,
                               double h_gu,
                               enum UlLinkClass *out);

/**
 * Free-space path loss at 28 GHz (dB).
 *
 * # Safety
 * `out` must be writable.
 */
enum UlStatus ul_fspl(double d, double *out);

/**
 * Building-blocked path loss (dB).
 *
 * # Safety
 * `out` must be writable.
 */
enum UlStatus ul_pl_nlos_building(double d, double *out);

/**
 * Foliage attenuation (dB) over depth `d_t` for a tree at `d1` from the ABS
 * and `d2` from the user.
 *
 * # Safety
 * `params` must be valid and `out` writable.
 */
enum UlStatus ul_veg_attenuation(const struct UlVegParams *params,
                                 double d1,
                                 double d2,
                                 double d_t,
                                 double r_t,
                                 double *out);

/**
 * Least-squares fit of `pl = A + 10·B·log10(d)` over `n` samples.
 *
 * # Safety
 * `d` and `pl` must hold `n` values; `out` must be writable.
 */
enum UlStatus ul_fit_ab(const double *d, const double *pl, size_t n, struct UlFit *out);

/**
 * P_LoS against elevation over `n_cities` cities; writes one value per
 * angle into `p_los`.
 *
 * # Safety
 * `config` must be valid; `angles` and `p_los` must hold `n_angles` values.
 */
enum UlStatus ul_plos_curve(struct UlParams params,
                            const struct UlGenConfig *config,
                            size_t n_cities,
                            const double *angles,
                            size_t n_angles,
                            enum UlScenario scenario,
                            double *p_los);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* URBANLOS_H */
