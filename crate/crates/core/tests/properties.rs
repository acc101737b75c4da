use std::str::FromStr;
use std::sync::Arc;

use proptest::prelude::*;
use subfrac::grid::{conjugate, from_u, to_u, Grid, GridFunction, OperatorParams, Sign};
use subfrac::interp::Pchip;
use subfrac::operators::{substantial_integral, InitialData, QuadratureConfig};
use subfrac::special::{gamma, mittag_leffler, MlSeriesConfig};
use subfrac::volterra::{
    initial_term, solve, HorizonPolicy, Hypotheses, IvpProblem, Method, Rhs, SolverConfig,
};

fn sampled(grid: &Arc<Grid>, coeffs: &[f64]) -> GridFunction {
    let c = coeffs.to_vec();
    GridFunction::from_fn(grid.clone(), move |t| {
        c[0] + c[1] * t + c[2] * (3.0 * t).sin() + c[3] * (-t).exp()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u_round_trip(t in 0.0f64..50.0, rho in 0.1f64..5.0) {
        let back = from_u(to_u(t, rho).unwrap(), rho).unwrap();
        prop_assert!((back - t).abs() <= 1e-12 * t.max(1.0));
    }

    #[test]
    fn conjugation_inverts(
        sigma in -2.0f64..3.0,
        rho in 0.3f64..3.0,
        coeffs in prop::array::uniform4(-2.0f64..2.0),
    ) {
        let p = OperatorParams::new(sigma, rho, 0.5, 0.0).unwrap();
        let grid = Arc::new(Grid::for_params(&p, 1.5, 40).unwrap());
        let f = sampled(&grid, &coeffs);
        let there = conjugate(&f, Sign::Plus, &p).unwrap();
        let back = conjugate(&there, Sign::Minus, &p).unwrap();
        prop_assert!(back.sup_distance(&f).unwrap() <= 1e-12 * f.sup_norm().max(1.0));
    }

    #[test]
    fn integral_is_linear(
        sigma in 0.0f64..3.0,
        rho in 0.3f64..3.0,
        alpha in 0.1f64..2.5,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        cf in prop::array::uniform4(-2.0f64..2.0),
        cg in prop::array::uniform4(-2.0f64..2.0),
    ) {
        let p = OperatorParams::new(sigma, rho, alpha, 0.0).unwrap();
        let grid = Arc::new(Grid::for_params(&p, 1.0, 64).unwrap());
        let cfg = QuadratureConfig::default();
        let f = sampled(&grid, &cf);
        let g = sampled(&grid, &cg);
        let lhs = substantial_integral(&p, &f.combine(a, &g, b).unwrap(), &cfg).unwrap();
        let rhs = substantial_integral(&p, &f, &cfg)
            .unwrap()
            .combine(a, &substantial_integral(&p, &g, &cfg).unwrap(), b)
            .unwrap();
        prop_assert!(lhs.sup_distance(&rhs).unwrap() <= 1e-11 * (1.0 + rhs.sup_norm()));
    }

    #[test]
    fn integral_preserves_sign(
        sigma in -1.0f64..3.0,
        rho in 0.3f64..3.0,
        alpha in 0.1f64..2.5,
        cf in prop::array::uniform4(0.0f64..2.0),
    ) {
        let p = OperatorParams::new(sigma, rho, alpha, 0.0).unwrap();
        let grid = Arc::new(Grid::for_params(&p, 1.0, 50).unwrap());
        let f = sampled(&grid, &cf);
        let i = substantial_integral(&p, &f, &QuadratureConfig::default()).unwrap();
        prop_assert!(i.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn integral_is_uniformly_continuous(
        sigma in 0.0f64..3.0,
        rho in 0.3f64..3.0,
        alpha in 0.1f64..2.5,
        t_end in 0.2f64..2.0,
        cf in prop::array::uniform4(-2.0f64..2.0),
        cg in prop::array::uniform4(-2.0f64..2.0),
    ) {
        let p = OperatorParams::new(sigma, rho, alpha, 0.0).unwrap();
        let grid = Arc::new(Grid::for_params(&p, t_end, 64).unwrap());
        let cfg = QuadratureConfig::default();
        let f = sampled(&grid, &cf);
        let g = sampled(&grid, &cg);
        let lhs = substantial_integral(&p, &f, &cfg)
            .unwrap()
            .sup_distance(&substantial_integral(&p, &g, &cfg).unwrap())
            .unwrap();
        let constant = t_end.powf(rho * alpha) / gamma(alpha + 1.0).unwrap();
        prop_assert!(lhs <= constant * f.sup_distance(&g).unwrap() * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn mittag_leffler_increases(alpha in 0.5f64..1.5, z in 0.0f64..5.0, dz in 0.01f64..1.0) {
        let cfg = MlSeriesConfig::default();
        let lo = mittag_leffler(alpha, z, &cfg).unwrap();
        let hi = mittag_leffler(alpha, z + dz, &cfg).unwrap();
        prop_assert!(hi > lo);
        prop_assert!(lo >= 1.0);
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..30.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!((lhs / rhs - 1.0).abs() < 1e-13);
    }

    #[test]
    fn pchip_hits_nodes_and_stays_in_hull(
        steps in prop::collection::vec(0.01f64..1.0, 3..20),
        ys in prop::collection::vec(-5.0f64..5.0, 20),
        q in 0.0f64..1.0,
    ) {
        let mut x = vec![0.0];
        for s in &steps {
            x.push(x.last().unwrap() + s);
        }
        let y = ys[..x.len()].to_vec();
        let p = Pchip::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            prop_assert!((p.eval(*xi).unwrap() - yi).abs() < 1e-12);
        }
        // inside any interval the interpolant stays between its end values
        let k = ((q * (x.len() - 1) as f64) as usize).min(x.len() - 2);
        let xq = x[k] + q.fract() * (x[k + 1] - x[k]);
        let v = p.eval(xq).unwrap();
        prop_assert!(v >= y[k].min(y[k + 1]) - 1e-12 && v <= y[k].max(y[k + 1]) + 1e-12);
    }

    #[test]
    fn rhs_grammar_round_trips(l in -5.0f64..5.0, c in -5.0f64..5.0) {
        for rhs in [Rhs::Zero, Rhs::Linear(l), Rhs::Example2, Rhs::Shifted { lambda: l, c }] {
            let text = rhs.to_string();
            let back = Rhs::from_str(&text).unwrap();
            prop_assert_eq!(back.to_string(), text);
            prop_assert_eq!(back.eval(0.3, 0.7), rhs.eval(0.3, 0.7));
        }
    }

    #[test]
    fn zero_force_solution_is_initial_term(
        sigma in 0.0f64..2.0,
        rho in 0.3f64..2.0,
        alpha in 0.2f64..2.0,
        b in prop::array::uniform2(-2.0f64..2.0),
    ) {
        let p = OperatorParams::new(sigma, rho, alpha, 0.0).unwrap();
        let m = p.m();
        let hyp = Hypotheses { tube_radius: 1.0, h_star: 1.0, rhs_bound: 1.0, lipschitz: 1.0 };
        let problem =
            IvpProblem::new(p, Rhs::Zero, InitialData::new(b[..m].to_vec()).unwrap(), hyp).unwrap();
        let cfg = SolverConfig { horizon: HorizonPolicy::Allow, ..SolverConfig::with_n(32) };
        for method in [Method::Picard, Method::ProductStep] {
            let sol = solve(&problem, 0.8, &cfg, method).unwrap();
            let expected = initial_term(&problem, sol.grid_fn.grid().clone()).unwrap();
            prop_assert!(sol.grid_fn.sup_distance(&expected).unwrap() < 1e-12);
        }
    }
}
