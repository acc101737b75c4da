#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "subfrac.h"

static double linear(double t, double y, void *user_data) {
    (void)t;
    return *(const double *)user_data * y;
}

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            char msg[256];                                             \
            subfrac_last_error_message(msg, sizeof msg);               \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond, msg); \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    double g = 0.0;
    CHECK(subfrac_gamma(5.0, &g) == SUBFRAC_STATUS_OK && g == 24.0);
    CHECK(subfrac_gamma(-2.0, &g) == SUBFRAC_STATUS_DOMAIN);

    SubfracParams p = {1.0, 2.0, 0.5, 0.0};
    SubfracGridFunction *f = NULL, *integral = NULL;
    CHECK(subfrac_power_exp_new(&p, 2.0, 1.0, 512, &f) == SUBFRAC_STATUS_OK);
    CHECK(subfrac_integral(&p, f, SUBFRAC_SCHEME_PRODUCT_TRAPEZOID, &integral) == SUBFRAC_STATUS_OK);
    size_t len = subfrac_grid_function_len(integral);
    CHECK(len == 513);
    double *values = malloc(len * sizeof *values);
    CHECK(subfrac_grid_function_copy(integral, NULL, values, len) == SUBFRAC_STATUS_OK);
    CHECK(fabs(values[len - 1] - 0.2213907) < 2e-4);
    free(values);
    subfrac_grid_function_free(integral);
    subfrac_grid_function_free(f);

    SubfracParams q = {1.0, 0.5, 0.5, 0.0};
    SubfracHypotheses hyp = {10.0, 1.0, 15.0, 0.9};
    SubfracSolverOptions opts = subfrac_solver_options_default();
    opts.n = 256;
    double b0 = 1.0, lambda = 0.9;
    SubfracSolution *sol = NULL;
    CHECK(subfrac_solve(&q, linear, &lambda, &b0, 1, &hyp, 1.0, &opts, &sol) ==
          SUBFRAC_STATUS_OUTSIDE_EXISTENCE);
    opts.allow_outside_existence = 1;
    CHECK(subfrac_solve(&q, linear, &lambda, &b0, 1, &hyp, 1.0, &opts, &sol) == SUBFRAC_STATUS_OK);
    const SubfracGridFunction *y = subfrac_solution_values(sol);
    double last[257];
    CHECK(subfrac_grid_function_copy(y, NULL, last, 257) == SUBFRAC_STATUS_OK);
    CHECK(fabs(last[256] - 1.48597) < 5e-3);
    subfrac_solution_free(sol);

    printf("ok\n");
    return 0;
}
