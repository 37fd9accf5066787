#ifndef MTKCS_H
#define MTKCS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MtkcsStatus {
  MTKCS_STATUS_OK = 0,
  MTKCS_STATUS_NULL_POINTER = 1,
  MTKCS_STATUS_INVALID_PARAMETER = 2,
  MTKCS_STATUS_DOMAIN = 3,
  MTKCS_STATUS_UNSUPPORTED_ORDER = 4,
  MTKCS_STATUS_OVERFLOW = 5,
  MTKCS_STATUS_NORMALIZATION = 6,
  MTKCS_STATUS_DEGENERATE = 7,
  MTKCS_STATUS_GRID_MISMATCH = 8,
  MTKCS_STATUS_NO_NEHARI_ROOT = 9,
  MTKCS_STATUS_DEGENERATE_RAY = 10,
  MTKCS_STATUS_MAX_ITERATIONS = 11,
  MTKCS_STATUS_LINE_SEARCH_FAILURE = 12,
  MTKCS_STATUS_FIT_FAILURE = 13,
  MTKCS_STATUS_IO = 14,
  MTKCS_STATUS_PANIC = 15,
} MtkcsStatus;

typedef struct MtkcsGrid MtkcsGrid;

typedef struct MtkcsProblem MtkcsProblem;

typedef struct MtkcsRiesz MtkcsRiesz;

typedef struct MtkcsSolution MtkcsSolution;

typedef struct MtkcsConstants {
  double omega;
  double alpha_n;
  double zeta;
  double two_nm;
  double kappa;
  /**
   * NaN unless a Riesz exponent was given.
   */
  double hls_constant;
} MtkcsConstants;

typedef struct MtkcsSolveOptions {
  double grad_tol;
  double nehari_tol;
  size_t max_iter;
} MtkcsSolveOptions;

typedef struct MtkcsSolveSummary {
  double energy;
  double relative_gradient_norm;
  double nehari_residual;
  size_t iterations;
  bool converged;
  bool positive;
} MtkcsSolveSummary;

typedef struct MtkcsBlowupSummary {
  double theta;
  double fitted_slope;
  double expected_lower_bound;
  double max_min_ratio;
  bool bounded;
  bool pass;
} MtkcsBlowupSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t mtkcs_last_error_message(char *buf, size_t len);

/**
 * Sharp constants for `(n, m)` with singular exponent `lambda`; pass NaN for
 * `mu` to skip the HLS constant.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum MtkcsStatus mtkcs_sharp_constants(uint32_t n,
                                       uint32_t m,
                                       double lambda,
                                       double mu,
                                       struct MtkcsConstants *out);

/**
 * Critical coefficient; `full_norm` selects the full-norm space.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum MtkcsStatus mtkcs_threshold(uint32_t n,
                                 uint32_t m,
                                 double lambda,
                                 bool full_norm,
                                 double *out);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum MtkcsStatus mtkcs_grid_new(double radius,
                                size_t points,
                                double grading,
                                struct MtkcsGrid **out);

/**
 * # Safety
 * `grid` must be null or come from [`mtkcs_grid_new`] and not be used afterwards.
 */
void mtkcs_grid_free(struct MtkcsGrid *grid);

/**
 * Number of nodes, 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
size_t mtkcs_grid_len(const struct MtkcsGrid *grid);

/**
 * Copies the nodes into `out`, which must hold `len == mtkcs_grid_len(grid)` values.
 *
 * # Safety
 * `grid` must be a live handle and `out` valid for `len` writes.
 */
enum MtkcsStatus mtkcs_grid_nodes(const struct MtkcsGrid *grid, double *out, size_t len);

/**
 * Assembles the radial Riesz matrix of order `mu` in dimension `n` on `grid`.
 *
 * # Safety
 * `grid` must be a live handle and `out` valid for writes.
 */
enum MtkcsStatus mtkcs_riesz_new(const struct MtkcsGrid *grid,
                                 double mu,
                                 uint32_t n,
                                 struct MtkcsRiesz **out);

/**
 * # Safety
 * `op` must be null or come from [`mtkcs_riesz_new`] and not be used afterwards.
 */
void mtkcs_riesz_free(struct MtkcsRiesz *op);

/**
 * `D(f, g)` for nodal values `f`, `g` of length `len`.
 *
 * # Safety
 * `op` must be a live handle, `f` and `g` valid for `len` reads, `out` for a write.
 */
enum MtkcsStatus mtkcs_riesz_form(const struct MtkcsRiesz *op,
                                  const double *f,
                                  const double *g,
                                  size_t len,
                                  double *out);

/**
 * Kirchhoff-Choquard problem with `m(t) = d0 + d1 t^beta` and power `a`
 * (NaN picks the default for the Kirchhoff model). The operator handle may
 * be freed afterwards.
 *
 * # Safety
 * `op` must be a live handle and `out` valid for writes.
 */
enum MtkcsStatus mtkcs_problem_new(const struct MtkcsRiesz *op,
                                   double d0,
                                   double d1,
                                   double beta,
                                   double a,
                                   struct MtkcsProblem **out);

/**
 * # Safety
 * `prob` must be null or come from [`mtkcs_problem_new`] and not be used afterwards.
 */
void mtkcs_problem_free(struct MtkcsProblem *prob);

/**
 * Nodal values per component, 0 for a null handle.
 *
 * # Safety
 * `prob` must be null or a live handle.
 */
size_t mtkcs_problem_len(const struct MtkcsProblem *prob);

/**
 * Discrete energy of the nodal pair `(u, v)`.
 *
 * # Safety
 * `prob` must be a live handle, `u` and `v` valid for `len` reads, `out` for a write.
 */
enum MtkcsStatus mtkcs_problem_energy(const struct MtkcsProblem *prob,
                                      const double *u,
                                      const double *v,
                                      size_t len,
                                      double *out);

/**
 * Upper bound for the ground-state level.
 *
 * # Safety
 * `prob` must be a live handle and `out` valid for writes.
 */
enum MtkcsStatus mtkcs_problem_level_bound(const struct MtkcsProblem *prob, double *out);

/**
 * Defaults used when [`mtkcs_solve`] receives a null options pointer.
 */
struct MtkcsSolveOptions mtkcs_solve_options_default(void);

/**
 * Ground state from the initial pair `(u, v)` (both of length
 * `mtkcs_problem_len(prob)`).
 *
 * # Safety
 * `prob` must be a live handle, `u` and `v` valid for `len` reads, `options`
 * null or valid, `out` valid for writes.
 */
enum MtkcsStatus mtkcs_solve(const struct MtkcsProblem *prob,
                             const double *u,
                             const double *v,
                             size_t len,
                             const struct MtkcsSolveOptions *options,
                             struct MtkcsSolution **out);

/**
 * # Safety
 * `sol` must be null or come from [`mtkcs_solve`] and not be used afterwards.
 */
void mtkcs_solution_free(struct MtkcsSolution *sol);

/**
 * # Safety
 * `sol` must be a live handle and `out` valid for writes.
 */
enum MtkcsStatus mtkcs_solution_summary(const struct MtkcsSolution *sol,
                                        struct MtkcsSolveSummary *out);

/**
 * Copies the nodal solution into `u` and `v`, each of length `len`.
 *
 * # Safety
 * `sol` must be a live handle, `u` and `v` valid for `len` writes.
 */
enum MtkcsStatus mtkcs_solution_values(const struct MtkcsSolution *sol,
                                       double *u,
                                       double *v,
                                       size_t len);

/**
 * Functional along the Moser pair sequence at `(1 + epsilon)` times the threshold.
 *
 * # Safety
 * `grid` must be a live handle, `ks` valid for `len` reads, `out` for a write.
 */
enum MtkcsStatus mtkcs_blowup_sweep(double epsilon,
                                    double lambda,
                                    uint32_t n,
                                    const struct MtkcsGrid *grid,
                                    const uint64_t *ks,
                                    size_t len,
                                    struct MtkcsBlowupSummary *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MTKCS_H */
