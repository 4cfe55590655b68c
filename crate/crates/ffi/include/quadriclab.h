#ifndef QUADRICLAB_H
#define QUADRICLAB_H

/* Generated by build.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Gauge used for angle functions.
 */
typedef enum QlGauge {
  QL_GAUGE_CANONICAL = 0,
  QL_GAUGE_NORMALIZED = 1,
  QL_GAUGE_FIXED = 2,
} QlGauge;

typedef enum QlStatus {
  QL_STATUS_OK = 0,
  QL_STATUS_NULL_POINTER = 1,
  QL_STATUS_INVALID_PARAMETER = 2,
  QL_STATUS_NOT_CONVERGED = 3,
  QL_STATUS_RANK_DEFICIENT = 4,
  QL_STATUS_NON_FINITE = 5,
  QL_STATUS_DEGENERATE = 6,
  QL_STATUS_FOCAL_RADIUS = 7,
  QL_STATUS_NOT_LAGRANGIAN = 8,
  QL_STATUS_NOT_ISOPARAMETRIC = 9,
  QL_STATUS_BUFFER_TOO_SMALL = 10,
  QL_STATUS_CHECK_FAILED = 11,
  QL_STATUS_INTERNAL = 12,
} QlStatus;

/**
 * Opaque hypersurface chart.
 */
typedef struct QlChart QlChart;

/**
 * Opaque profile trajectory.
 */
typedef struct QlTrajectory QlTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *ql_last_error_message(void);

/**
 * Frees a string returned by the library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void ql_string_free(char *s);

/**
 * Round sphere of radius `r` in `S^{n+1}`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QlStatus ql_chart_sphere(size_t n, double r, struct QlChart **out);

/**
 * Product `S^k(r1) x S^{n-k}(r2)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QlStatus ql_chart_product(size_t k, size_t n, double r1, double r2, struct QlChart **out);

/**
 * Tube of radius `r` over the Veronese surface in `S^4`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QlStatus ql_chart_cartan(double r, struct QlChart **out);

/**
 * # Safety
 * `chart` must come from a `ql_chart_*` constructor, or be null.
 */
void ql_chart_free(struct QlChart *chart);

/**
 * Hypersurface dimension, 0 for a null handle.
 *
 * # Safety
 * `chart` must be a live handle or null.
 */
size_t ql_chart_dim(const struct QlChart *chart);

/**
 * Writes the chart centre (`dim` values) into `out`.
 *
 * # Safety
 * `chart` must be a live handle and `out` must hold `out_len` doubles.
 */
enum QlStatus ql_chart_center(const struct QlChart *chart, double *out, size_t out_len);

/**
 * Angle functions of the Gauss map at `p` (length `dim`), written to
 * `thetas` (length `dim`). `phi` is the fixed gauge for `QlGauge::Fixed`;
 * the gauge actually used is written to `out_phi` when non-null.
 *
 * # Safety
 * Pointers must be valid for the stated lengths.
 */
enum QlStatus ql_angles(const struct QlChart *chart,
                        const double *p,
                        size_t p_len,
                        double h,
                        enum QlGauge gauge,
                        double phi,
                        double *thetas,
                        size_t thetas_len,
                        double *out_phi);

/**
 * Integrates the profile equation with fixed-step RK4 over `[t0, t1]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QlStatus ql_trajectory_integrate(size_t n,
                                      double alpha0,
                                      double dalpha0,
                                      double t0,
                                      double t1,
                                      size_t steps,
                                      struct QlTrajectory **out);

/**
 * # Safety
 * `traj` must come from `ql_trajectory_integrate`, or be null.
 */
void ql_trajectory_free(struct QlTrajectory *traj);

/**
 * Number of stored states, 0 for a null handle.
 *
 * # Safety
 * `traj` must be a live handle or null.
 */
size_t ql_trajectory_len(const struct QlTrajectory *traj);

/**
 * 0 if the run completed, 1 if stopped at the slope guard, 2 at the sine guard.
 *
 * # Safety
 * `traj` must be a live handle or null.
 */
int32_t ql_trajectory_stop_reason(const struct QlTrajectory *traj);

/**
 * State `i` as `[theta, alpha, dalpha]`.
 *
 * # Safety
 * `traj` must be a live handle and `out` must hold three doubles.
 */
enum QlStatus ql_trajectory_state(const struct QlTrajectory *traj, size_t i, double *out);

/**
 * Runs the `verify` command line given as a space-separated argument string
 * (for example `"--example cartan --grid 2"`) and returns the JSON report
 * in `out_json`, to be released with `ql_string_free`. Returns
 * `CheckFailed` when the report contains failures; the report is still
 * written.
 *
 * # Safety
 * `args` must be a NUL-terminated string and `out_json` a valid pointer.
 */
enum QlStatus ql_verify_json(const char *args, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUADRICLAB_H */
