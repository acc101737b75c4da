//! Gronwall-type bounds and continuous-dependence experiments.
//!
//! The inequality
//!
//! ```text
//! p(t) <= q(t) + rho^{1-alpha} g(t) int_a^t s^{rho-1} e^{-sigma(t^rho - s^rho)} (t^rho - s^rho)^{alpha-1} p(s) ds
//! ```
//!
//! implies `p <= q + sum_{k>=1} (g Gamma(alpha) rho^{-alpha})^k sI^{k alpha, rho} q`, which
//! collapses to `q E_alpha(g Gamma(alpha) ((t^rho - a^rho)/rho)^alpha)` for
//! non-decreasing `q`. The dependence experiments solve two nearby problems
//! and compare the measured deviation with the envelope obtained from that bound.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, OperatorParams};
use crate::operators::{substantial_integral_of_order, InitialData, QuadratureConfig};
use crate::special::{gamma, mittag_leffler, MlSeriesConfig};
use crate::volterra::{solve, IvpProblem, Method, Rhs, Solution, SolverConfig, TubeRegion};

/// Relative size of the last series term above which the truncated series is flagged.
pub const SERIES_TRUNCATION_TOL: f64 = 1e-8;

type Coefficient = dyn Fn(f64) -> f64 + Send + Sync;

/// Data of the Gronwall inequality on one grid.
#[derive(Clone)]
pub struct GronwallInput {
    p: GridFunction,
    q: GridFunction,
    g: Arc<Coefficient>,
    params: OperatorParams,
}

impl GronwallInput {
    /// Checks that `q >= 0`, and that `g` is non-negative and non-decreasing at the grid nodes.
    pub fn new(
        p: GridFunction,
        q: GridFunction,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        params: OperatorParams,
    ) -> Result<Self> {
        q.grid().check_params(&params)?;
        if p.grid() != q.grid() {
            return Err(Error::InvalidGrid("p and q must share a grid".into()));
        }
        if let Some(v) = q.values().iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidData(format!(
                "q must be non-negative, found {v}"
            )));
        }
        let gs: Vec<f64> = q.grid().nodes().iter().map(|&t| g(t)).collect();
        if gs.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidData(
                "g must be finite and non-negative".into(),
            ));
        }
        if gs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidData("g must be non-decreasing".into()));
        }
        Ok(Self {
            p,
            q,
            g: Arc::new(g),
            params,
        })
    }

    pub fn p(&self) -> &GridFunction {
        &self.p
    }

    pub fn q(&self) -> &GridFunction {
        &self.q
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    pub fn g(&self, t: f64) -> f64 {
        (self.g)(t)
    }
}

/// `q E_alpha(g Gamma(alpha) ((t^rho - a^rho)/rho)^alpha)`.
pub fn gronwall_bound_nondecreasing(
    q_val: f64,
    g_val: f64,
    params: &OperatorParams,
    t: f64,
) -> Result<f64> {
    if !(q_val >= 0.0) || !(g_val >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "q and g must be non-negative, got {q_val} and {g_val}"
        )));
    }
    if t < params.a() {
        return Err(Error::Domain(format!(
            "t = {t} below lower limit {}",
            params.a()
        )));
    }
    let alpha = params.alpha();
    let span = (params.to_u(t)? - params.u_a()).max(0.0) / params.rho();
    let z = g_val * gamma(alpha)? * span.powf(alpha);
    Ok(q_val * mittag_leffler(alpha, z, &MlSeriesConfig::default())?)
}

#[derive(Debug, Clone)]
pub struct GronwallSeries {
    pub bound: GridFunction,
    pub terms_used: usize,
    /// `max term_k / max partial sum` for the last term added.
    pub last_ratio: f64,
    /// Set when `k_max` was reached before the last term fell below
    /// [`SERIES_TRUNCATION_TOL`] times the running sum.
    pub truncated: bool,
}

/// Truncated iterated-kernel series `q + sum_{k=1}^{K} (g(t) Gamma(alpha) rho^{-alpha})^k sI^{k alpha} q`.
///
/// Each term is a single product integration of order `k alpha`; stops early
/// once a term is below [`SERIES_TRUNCATION_TOL`] relative to the sum.
pub fn gronwall_series_bound(input: &GronwallInput, k_max: usize) -> Result<GronwallSeries> {
    if k_max == 0 {
        return Err(Error::InvalidParams("k_max must be at least 1".into()));
    }
    let params = &input.params;
    let alpha = params.alpha();
    let coef_base = gamma(alpha)? * params.rho().powf(-alpha);
    let factors: Vec<f64> = input
        .q
        .grid()
        .nodes()
        .iter()
        .map(|&t| input.g(t) * coef_base)
        .collect();
    let cfg = QuadratureConfig::default();
    let mut sum = input.q.values().to_vec();
    let mut powers = vec![1.0; sum.len()];
    let mut last_ratio = f64::INFINITY;
    let mut terms_used = 0;
    for k in 1..=k_max {
        let order = k as f64 * alpha;
        let iq = substantial_integral_of_order(params, order, &input.q, &cfg)?;
        let mut term_max = 0.0f64;
        for (i, s) in sum.iter_mut().enumerate() {
            powers[i] *= factors[i];
            let term = powers[i] * iq.values()[i];
            if !term.is_finite() {
                return Err(Error::Overflow(format!("series term {k} is not finite")));
            }
            *s += term;
            term_max = term_max.max(term.abs());
        }
        terms_used = k;
        let sum_max = sum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        last_ratio = if sum_max > 0.0 {
            term_max / sum_max
        } else {
            0.0
        };
        if last_ratio <= SERIES_TRUNCATION_TOL {
            break;
        }
    }
    Ok(GronwallSeries {
        bound: GridFunction::new(input.q.grid().clone(), sum)?,
        terms_used,
        last_ratio,
        truncated: last_ratio > SERIES_TRUNCATION_TOL,
    })
}

/// Measured deviation between two solves against the theoretical envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub epsilon: f64,
    pub epsilon_tilde: f64,
    pub sup_diff: f64,
    pub bound: f64,
    /// `sup_diff / (epsilon + epsilon_tilde)`; absent when both are zero.
    pub ratio: Option<f64>,
    pub n: usize,
    pub h: f64,
    pub method: String,
    /// Discretization slack: 10 x (sum of both solves' error estimates + Picard tolerance).
    pub tolerance_budget: f64,
    pub within_bound: bool,
    /// Force experiment: `max |f - f~|` over the K-tube corners at each node.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_tube: Option<f64>,
    /// Order experiment: zero of the kernel difference.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    /// Order experiment: `int_0^{h^rho} |v^{alpha-1}/Gamma(alpha) - v^{alpha~-1}/Gamma(alpha~)| dv`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_integral: Option<f64>,
}

fn envelope(problem: &IvpProblem, h: f64) -> Result<f64> {
    let p = problem.params();
    let z = problem.hypotheses().lipschitz * h.powf(p.rho() * p.alpha());
    mittag_leffler(p.alpha(), z, &MlSeriesConfig::default())
}

fn sup_diff(a: &Solution, b: &Solution) -> Result<f64> {
    a.grid_fn.sup_distance(&b.grid_fn)
}

#[allow(clippy::too_many_arguments)]
fn report(
    epsilon: f64,
    epsilon_tilde: f64,
    diff: f64,
    bound: f64,
    h: f64,
    cfg: &SolverConfig,
    method: Method,
    solves: (&Solution, &Solution),
) -> PerturbationReport {
    let budget = 10.0 * (solves.0.error_estimate + solves.1.error_estimate + cfg.picard_tol);
    let total = epsilon + epsilon_tilde;
    PerturbationReport {
        epsilon,
        epsilon_tilde,
        sup_diff: diff,
        bound,
        ratio: (total > 0.0).then(|| diff / total),
        n: cfg.n,
        h,
        method: method.to_string(),
        tolerance_budget: budget,
        within_bound: diff <= bound + budget,
        epsilon_tube: None,
        v0: None,
        kernel_integral: None,
    }
}

/// Perturbed initial data `c` in place of `b`.
///
/// Envelope: `m eps sum_{k<m} h^{rho k}/k! E_alpha(L h^{rho alpha})` with `eps = max |b_k - c_k|`.
pub fn dependence_initial(
    problem: &IvpProblem,
    c: &InitialData,
    h: f64,
    cfg: &SolverConfig,
    method: Method,
) -> Result<PerturbationReport> {
    let perturbed = problem.with_initial(c.clone())?;
    let eps = problem
        .initial()
        .values()
        .iter()
        .zip(c.values())
        .fold(0.0f64, |m, (b, c)| m.max((b - c).abs()));
    let psi = solve(problem, h, cfg, method)?;
    let phi = solve(&perturbed, h, cfg, method)?;
    let p = problem.params();
    let m = p.m();
    let mut taylor = 0.0;
    let mut fact = 1.0;
    for k in 0..m {
        if k > 0 {
            fact *= k as f64;
        }
        taylor += h.powf(p.rho() * k as f64) / fact;
    }
    let bound = m as f64 * eps * taylor * envelope(problem, h)?;
    Ok(report(
        eps,
        0.0,
        sup_diff(&psi, &phi)?,
        bound,
        h,
        cfg,
        method,
        (&psi, &phi),
    ))
}

/// Perturbed right-hand side `f_tilde`.
///
/// `eps` is `max_i |f(t_i, phi_i) - f~(t_i, phi_i)|` along the perturbed
/// trajectory `phi`; envelope `eps h^{rho alpha}/Gamma(alpha+1) E_alpha(L h^{rho alpha})`.
pub fn dependence_force(
    problem: &IvpProblem,
    f_tilde: &Rhs,
    h: f64,
    cfg: &SolverConfig,
    method: Method,
) -> Result<PerturbationReport> {
    let perturbed = problem.with_rhs(f_tilde.clone());
    let psi = solve(problem, h, cfg, method)?;
    let phi = solve(&perturbed, h, cfg, method)?;
    let f = problem.rhs();
    let nodes = phi.grid_fn.grid().nodes();
    let eps = nodes
        .iter()
        .zip(phi.grid_fn.values())
        .fold(0.0f64, |m, (&t, &y)| {
            m.max((f.eval(t, y) - f_tilde.eval(t, y)).abs())
        });
    let tube = TubeRegion::for_problem(problem, h)?;
    let eps_tube = nodes.iter().fold(0.0f64, |m, &t| {
        let c = tube.center(t);
        [c - tube.radius(), c + tube.radius()]
            .iter()
            .fold(m, |m, &y| m.max((f.eval(t, y) - f_tilde.eval(t, y)).abs()))
    });
    let p = problem.params();
    let bound = eps * h.powf(p.rho() * p.alpha()) / gamma(p.alpha() + 1.0)? * envelope(problem, h)?;
    let mut r = report(
        eps,
        0.0,
        sup_diff(&psi, &phi)?,
        bound,
        h,
        cfg,
        method,
        (&psi, &phi),
    );
    r.epsilon_tube = Some(eps_tube);
    Ok(r)
}

/// Zero `v0 = (Gamma(alpha~)/Gamma(alpha))^{1/(alpha~ - alpha)}` of the kernel difference.
pub fn kernel_difference_zero(alpha: f64, alpha_tilde: f64) -> Result<f64> {
    if !(alpha_tilde > alpha) || !(alpha > 0.0) {
        return Err(Error::InvalidParams(format!(
            "need 0 < alpha < alpha~, got {alpha} and {alpha_tilde}"
        )));
    }
    Ok((gamma(alpha_tilde)? / gamma(alpha)?).powf(1.0 / (alpha_tilde - alpha)))
}

/// `int_0^big_h |v^{alpha-1}/Gamma(alpha) - v^{alpha~-1}/Gamma(alpha~)| dv`, split at `v0`.
pub fn kernel_difference_integral(alpha: f64, alpha_tilde: f64, big_h: f64) -> Result<f64> {
    if alpha_tilde == alpha {
        return Ok(0.0);
    }
    let v0 = kernel_difference_zero(alpha, alpha_tilde)?;
    let ga = gamma(alpha + 1.0)?;
    let gt = gamma(alpha_tilde + 1.0)?;
    let anti = |x: f64| x.powf(alpha) / ga - x.powf(alpha_tilde) / gt;
    // the lower-order kernel dominates on (0, v0)
    Ok(if big_h <= v0 {
        anti(big_h)
    } else {
        2.0 * anti(v0) - anti(big_h)
    })
}

/// Order raised from `alpha` to `alpha_tilde`.
///
/// `b_extra` supplies `b_m .. b_{m~-1}` and is required exactly when
/// `ceil(alpha~) > ceil(alpha)`. Envelope:
/// `(sum_{k=m}^{m~-1} h^{rho k}/k! |b_k| + M_eff KD) E_alpha(L h^{rho alpha})` where
/// `KD` is [`kernel_difference_integral`] over `[0, h^rho]` and `M_eff` is the larger of
/// `M` and the measured `max |f(t_i, phi_i)|`.
pub fn dependence_order(
    problem: &IvpProblem,
    alpha_tilde: f64,
    b_extra: Option<&InitialData>,
    h: f64,
    cfg: &SolverConfig,
    method: Method,
) -> Result<PerturbationReport> {
    let p = problem.params();
    let alpha = p.alpha();
    if !(alpha_tilde >= alpha) {
        return Err(Error::InvalidParams(format!(
            "alpha~ = {alpha_tilde} must not be below alpha = {alpha}"
        )));
    }
    let m = p.m();
    let m_tilde = alpha_tilde.ceil() as usize;
    let mut b = problem.initial().values().to_vec();
    let extra: Vec<f64> = match (m_tilde > m, b_extra) {
        (true, Some(e)) if e.len() == m_tilde - m => e.values().to_vec(),
        (true, _) => {
            return Err(Error::InvalidData(format!(
                "raising the order to {alpha_tilde} needs {} extra initial values",
                m_tilde - m
            )))
        }
        (false, Some(_)) => {
            return Err(Error::InvalidData(
                "extra initial values given but the integer part of the order is unchanged".into(),
            ))
        }
        (false, None) => Vec::new(),
    };
    b.extend_from_slice(&extra);
    let perturbed = problem.with_order(alpha_tilde, InitialData::new(b)?)?;
    let psi = solve(problem, h, cfg, method)?;
    let phi = solve(&perturbed, h, cfg, method)?;

    let eps = alpha_tilde - alpha;
    let eps_tilde = extra.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let big_h = h.powf(p.rho());
    let kd = kernel_difference_integral(alpha, alpha_tilde, big_h)?;
    let f = problem.rhs();
    let measured_m = phi
        .grid_fn
        .grid()
        .nodes()
        .iter()
        .zip(phi.grid_fn.values())
        .fold(0.0f64, |acc, (&t, &y)| acc.max(f.eval(t, y).abs()));
    let m_eff = problem.hypotheses().rhs_bound.max(measured_m);
    let mut taylor = 0.0;
    for (j, bk) in extra.iter().enumerate() {
        let k = m + j;
        taylor += big_h.powi(k as i32) / gamma(k as f64 + 1.0)? * bk.abs();
    }
    let bound = (taylor + m_eff * kd) * envelope(problem, h)?;
    let mut r = report(
        eps,
        eps_tilde,
        sup_diff(&psi, &phi)?,
        bound,
        h,
        cfg,
        method,
        (&psi, &phi),
    );
    if eps > 0.0 {
        r.v0 = Some(kernel_difference_zero(alpha, alpha_tilde)?);
    }
    r.kernel_integral = Some(kd);
    Ok(r)
}
