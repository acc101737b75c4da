#ifndef SUBFRAC_H
#define SUBFRAC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result of every fallible call.
 */
typedef enum SubfracStatus {
  SUBFRAC_STATUS_OK = 0,
  /**
   * A parameter, grid or data value was rejected.
   */
  SUBFRAC_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The argument lies outside the domain of the function (poles, t below a, ...).
   */
  SUBFRAC_STATUS_DOMAIN = 2,
  /**
   * A numerical procedure failed (overflow, non-convergence, non-finite values).
   */
  SUBFRAC_STATUS_NUMERICAL = 3,
  /**
   * The requested horizon exceeds the guaranteed existence interval.
   */
  SUBFRAC_STATUS_OUTSIDE_EXISTENCE = 4,
  SUBFRAC_STATUS_NULL_POINTER = 5,
  SUBFRAC_STATUS_PANIC = 6,
} SubfracStatus;

typedef enum SubfracScheme {
  SUBFRAC_SCHEME_PRODUCT_TRAPEZOID = 0,
  SUBFRAC_SCHEME_PRODUCT_RECTANGLE = 1,
} SubfracScheme;

typedef enum SubfracMethod {
  SUBFRAC_METHOD_PICARD = 0,
  SUBFRAC_METHOD_PRODUCT_STEP = 1,
} SubfracMethod;

/**
 * Values of a function on a grid uniform in `u = t^rho`.
 */
typedef struct SubfracGridFunction SubfracGridFunction;

/**
 * Result of an initial value problem solve.
 */
typedef struct SubfracSolution SubfracSolution;

/**
 * Operator parameters: tempering `sigma`, power `rho > 0`, order `alpha > 0`, lower limit `a >= 0`.
 */
typedef struct SubfracParams {
  double sigma;
  double rho;
  double alpha;
  double a;
} SubfracParams;

/**
 * Tube radius `K`, existence bound `h*`, bound `M` on |f| in the tube, Lipschitz constant `L`.
 */
typedef struct SubfracHypotheses {
  double tube_radius;
  double h_star;
  double rhs_bound;
  double lipschitz;
} SubfracHypotheses;

typedef struct SubfracSolverOptions {
  /**
   * Number of grid intervals.
   */
  size_t n;
  double picard_tol;
  size_t picard_max_iters;
  size_t corrector_iters;
  enum SubfracMethod method;
  /**
   * Nonzero to solve even when `h` exceeds the guaranteed existence interval.
   */
  uint8_t allow_outside_existence;
} SubfracSolverOptions;

/**
 * Right-hand side `f(t, y)` supplied by the caller; `user_data` is passed through unchanged.
 */
typedef double (*SubfracRhsFn)(double t, double y, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (NUL-terminated, truncated to `capacity`).
 *
 * Returns the full message length in bytes excluding the terminator, so a
 * caller can retry with a larger buffer. `buffer` may be NULL when `capacity` is 0.
 *
 * # Safety
 * `buffer` must point to at least `capacity` writable bytes.
 */
size_t subfrac_last_error_message(char *buffer, size_t capacity);

/**
 * Gamma function.
 *
 * # Safety
 * `out` must be a valid pointer to a `double`.
 */
enum SubfracStatus subfrac_gamma(double x, double *out);

/**
 * One-parameter Mittag-Leffler function `E_alpha(z)` with the default series settings.
 *
 * # Safety
 * `out` must be a valid pointer to a `double`.
 */
enum SubfracStatus subfrac_mittag_leffler(double alpha, double z, double *out);

/**
 * Samples `e^{-sigma t^rho} (t^rho - a^rho)^beta` on `n` intervals of `[a, t_end]`.
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum SubfracStatus subfrac_power_exp_new(const struct SubfracParams *params,
                                         double beta,
                                         double t_end,
                                         size_t n,
                                         struct SubfracGridFunction **out);

/**
 * Wraps `len = n + 1` values given at the nodes of the `n`-interval grid on `[a, t_end]`.
 *
 * # Safety
 * `params` and `out` must be valid; `values` must point to `len` doubles.
 */
enum SubfracStatus subfrac_grid_function_new(const struct SubfracParams *params,
                                             double t_end,
                                             const double *values,
                                             size_t len,
                                             struct SubfracGridFunction **out);

/**
 * Number of nodes (`n + 1`); 0 for NULL.
 *
 * # Safety
 * `f` must be NULL or a live handle.
 */
size_t subfrac_grid_function_len(const struct SubfracGridFunction *f);

/**
 * Copies nodes and values into caller buffers of length `len`, which must equal the node count.
 * Either buffer may be NULL to skip it.
 *
 * # Safety
 * `f` must be a live handle; non-NULL buffers must hold `len` doubles.
 */
enum SubfracStatus subfrac_grid_function_copy(const struct SubfracGridFunction *f,
                                              double *t_out,
                                              double *values_out,
                                              size_t len);

/**
 * # Safety
 * `f` must be NULL or a handle not freed before.
 */
void subfrac_grid_function_free(struct SubfracGridFunction *f);

/**
 * Generalized substantial integral of order `params->alpha`.
 *
 * # Safety
 * `params`, `f` and `out` must be valid; `f` must live on the grid of `params`.
 */
enum SubfracStatus subfrac_integral(const struct SubfracParams *params,
                                    const struct SubfracGridFunction *f,
                                    enum SubfracScheme scheme,
                                    struct SubfracGridFunction **out);

/**
 * Riemann-Liouville type derivative.
 *
 * # Safety
 * As for [`subfrac_integral`].
 */
enum SubfracStatus subfrac_rl_derivative(const struct SubfracParams *params,
                                         const struct SubfracGridFunction *f,
                                         enum SubfracScheme scheme,
                                         struct SubfracGridFunction **out);

/**
 * Caputo type derivative.
 *
 * # Safety
 * As for [`subfrac_integral`].
 */
enum SubfracStatus subfrac_caputo_derivative(const struct SubfracParams *params,
                                             const struct SubfracGridFunction *f,
                                             enum SubfracScheme scheme,
                                             struct SubfracGridFunction **out);

/**
 * Guaranteed existence horizon `min{h*, h~, (Gamma(alpha+1) K / M)^{1/(rho alpha)}}`.
 *
 * `h_tilde` must lie strictly below `(Gamma(alpha+1)/L)^{1/(rho alpha)}`;
 * `params->a` must be 0.
 *
 * # Safety
 * `params`, `hyp` and `out` must be valid pointers.
 */
enum SubfracStatus subfrac_existence_h(const struct SubfracParams *params,
                                       const struct SubfracHypotheses *hyp,
                                       double h_tilde,
                                       double *out);

/**
 * Default solver options: 256 intervals, Picard with tolerance 1e-10 and 100 sweeps, 2 corrector passes.
 */
struct SubfracSolverOptions subfrac_solver_options_default(void);

/**
 * Solves the Caputo-type problem `D y = f(t, y)`, `y^(k)(0) = b[k]`, on `[0, h]`
 * with a caller-supplied right-hand side. `b_len` must equal `ceil(alpha)`.
 *
 * # Safety
 * All pointers must be valid; `b` must hold `b_len` doubles. `f` is invoked on the
 * calling thread during this call only.
 */
enum SubfracStatus subfrac_solve(const struct SubfracParams *params,
                                 SubfracRhsFn f,
                                 void *user_data,
                                 const double *b,
                                 size_t b_len,
                                 const struct SubfracHypotheses *hyp,
                                 double h,
                                 const struct SubfracSolverOptions *options,
                                 struct SubfracSolution **out);

/**
 * As [`subfrac_solve`] with a built-in right-hand side:
 * `"zero"`, `"linear:<l>"`, `"example2"` or `"shifted:<l>:<c>"`.
 *
 * # Safety
 * `rhs` must be a NUL-terminated string; other pointers as for [`subfrac_solve`].
 */
enum SubfracStatus subfrac_solve_builtin(const struct SubfracParams *params,
                                         const char *rhs,
                                         const double *b,
                                         size_t b_len,
                                         const struct SubfracHypotheses *hyp,
                                         double h,
                                         const struct SubfracSolverOptions *options,
                                         struct SubfracSolution **out);

/**
 * Borrowed view of the solution values; valid until the solution is freed.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
const struct SubfracGridFunction *subfrac_solution_values(const struct SubfracSolution *s);

/**
 * Picard sweeps, or corrector passes per node for the marching scheme; 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t subfrac_solution_iterations(const struct SubfracSolution *s);

/**
 * Largest observed ratio of successive fixed-point updates; NaN for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
double subfrac_solution_contraction_estimate(const struct SubfracSolution *s);

/**
 * Max difference to the half-grid solution at shared nodes; NaN for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
double subfrac_solution_error_estimate(const struct SubfracSolution *s);

/**
 * # Safety
 * `s` must be NULL or a handle not freed before.
 */
void subfrac_solution_free(struct SubfracSolution *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBFRAC_H */
