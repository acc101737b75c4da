//! Caputo-type initial value problems
//!
//! ```text
//! sD^{alpha,rho}_0 psi(t) = f(t, psi(t)),   sD^{k,rho} psi(0) = b_k,  k < m
//! ```
//!
//! solved through the equivalent Volterra equation `psi = E psi` with
//!
//! ```text
//! E psi(t) = e^{-sigma t^rho} sum_k b_k t^{rho k} / k!  +  sI^{alpha,rho}_0 [f(., psi(.))](t).
//! ```
//!
//! Two discretizations are offered: Picard iteration of `E` on the whole
//! grid, and a node-by-node product-integration march with a rectangle
//! predictor and trapezoid corrector.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, OperatorParams};
use crate::operators::{taylor_term, InitialData, ProductWeights};
use crate::special::gamma;

type RhsFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Right-hand side `f(t, y)` of the differential equation.
#[derive(Clone)]
pub enum Rhs {
    Zero,
    /// `f = lambda * y`
    Linear(f64),
    /// `f = t e^{-t^2} y^2 / (1 + y^2)`
    Example2,
    /// `f = lambda * y + c`
    Shifted {
        lambda: f64,
        c: f64,
    },
    Custom(Arc<RhsFn>),
}

impl Rhs {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Rhs::Custom(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, t: f64, y: f64) -> f64 {
        match self {
            Rhs::Zero => 0.0,
            Rhs::Linear(l) => l * y,
            Rhs::Example2 => {
                let y2 = y * y;
                t * (-t * t).exp() * y2 / (1.0 + y2)
            }
            Rhs::Shifted { lambda, c } => lambda * y + c,
            Rhs::Custom(f) => f(t, y),
        }
    }

    /// Exact Lipschitz constant in `y` when it is known in closed form.
    pub fn known_lipschitz(&self) -> Option<f64> {
        match self {
            Rhs::Zero => Some(0.0),
            Rhs::Linear(l) | Rhs::Shifted { lambda: l, .. } => Some(l.abs()),
            _ => None,
        }
    }
}

impl fmt::Debug for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Zero => write!(f, "zero"),
            Rhs::Linear(l) => write!(f, "linear:{l}"),
            Rhs::Example2 => write!(f, "example2"),
            Rhs::Shifted { lambda, c } => write!(f, "shifted:{lambda}:{c}"),
            Rhs::Custom(_) => write!(f, "custom"),
        }
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Rhs {
    type Err = Error;

    /// Grammar: `zero`, `linear:<lambda>`, `example2`, `shifted:<lambda>:<c>`.
    fn from_str(s: &str) -> Result<Self> {
        let num = |x: &str| -> Result<f64> {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidParams(format!("bad number `{x}` in rhs `{s}`")))
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["zero"] => Ok(Rhs::Zero),
            ["example2"] => Ok(Rhs::Example2),
            ["linear", l] => Ok(Rhs::Linear(num(l)?)),
            ["shifted", l, c] => Ok(Rhs::Shifted {
                lambda: num(l)?,
                c: num(c)?,
            }),
            _ => Err(Error::InvalidParams(format!(
                "unknown rhs `{s}` (expected zero, linear:<l>, example2 or shifted:<l>:<c>)"
            ))),
        }
    }
}

/// Hypotheses on the problem: the tube `H` of radius `tube_radius` around the
/// initial-data term over `[0, h_star]`, a bound `rhs_bound` on `|f|` in `H`
/// and a Lipschitz constant `lipschitz` of `f` in its second argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hypotheses {
    pub tube_radius: f64,
    pub h_star: f64,
    pub rhs_bound: f64,
    pub lipschitz: f64,
}

impl Hypotheses {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("K", self.tube_radius),
            ("h*", self.h_star),
            ("M", self.rhs_bound),
            ("L", self.lipschitz),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct IvpProblem {
    params: OperatorParams,
    rhs: Rhs,
    initial: InitialData,
    hyp: Hypotheses,
}

impl IvpProblem {
    pub fn new(
        params: OperatorParams,
        rhs: Rhs,
        initial: InitialData,
        hyp: Hypotheses,
    ) -> Result<Self> {
        if params.a() != 0.0 {
            return Err(Error::InvalidParams(format!(
                "initial value problems start at a = 0, got a = {}",
                params.a()
            )));
        }
        hyp.validate()?;
        initial.check_order(&params)?;
        Ok(Self {
            params,
            rhs,
            initial,
            hyp,
        })
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    pub fn initial(&self) -> &InitialData {
        &self.initial
    }

    pub fn hypotheses(&self) -> &Hypotheses {
        &self.hyp
    }

    /// Same hypotheses and initial data with another right-hand side.
    pub fn with_rhs(&self, rhs: Rhs) -> Self {
        Self {
            rhs,
            ..self.clone()
        }
    }

    /// Same problem with other initial data (of the same length).
    pub fn with_initial(&self, initial: InitialData) -> Result<Self> {
        initial.check_order(&self.params)?;
        Ok(Self {
            initial,
            ..self.clone()
        })
    }

    /// Same problem with another order; `initial` must have `ceil(alpha)` entries.
    pub fn with_order(&self, alpha: f64, initial: InitialData) -> Result<Self> {
        let params = self.params.with_alpha(alpha)?;
        Self::new(params, self.rhs.clone(), initial, self.hyp)
    }

    /// `L h^{rho alpha} / Gamma(alpha + 1)`.
    pub fn contraction_factor(&self, h: f64) -> Result<f64> {
        let p = &self.params;
        Ok(self.hyp.lipschitz * h.powf(p.rho() * p.alpha()) / gamma(p.alpha() + 1.0)?)
    }

    /// `(Gamma(alpha+1)/L)^{1/(rho alpha)}`: `h~` must stay strictly below this.
    pub fn h_tilde_limit(&self) -> Result<f64> {
        let p = &self.params;
        Ok((gamma(p.alpha() + 1.0)? / self.hyp.lipschitz).powf(1.0 / (p.rho() * p.alpha())))
    }

    fn tube_limit(&self) -> Result<f64> {
        let p = &self.params;
        Ok(
            (gamma(p.alpha() + 1.0)? * self.hyp.tube_radius / self.hyp.rhs_bound)
                .powf(1.0 / (p.rho() * p.alpha())),
        )
    }
}

/// `min{h*, h~, (Gamma(alpha+1) K / M)^{1/(rho alpha)}}` for an admissible `h~`.
pub fn existence_h(problem: &IvpProblem, h_tilde: f64) -> Result<f64> {
    let limit = problem.h_tilde_limit()?;
    if !(h_tilde > 0.0) || !(h_tilde < limit) {
        return Err(Error::InvalidHTilde { h_tilde, limit });
    }
    Ok(problem.hyp.h_star.min(h_tilde).min(problem.tube_limit()?))
}

/// What to do when the requested horizon lies outside the guaranteed existence interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonPolicy {
    #[default]
    Enforce,
    /// Solve anyway; the result is outside the guaranteed regime.
    Allow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub n: usize,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub corrector_iters: usize,
    pub horizon: HorizonPolicy,
    /// Also solve on the half grid to estimate the discretization error.
    pub estimate_error: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 256,
            picard_tol: 1e-10,
            picard_max_iters: 100,
            corrector_iters: 2,
            horizon: HorizonPolicy::Enforce,
            estimate_error: true,
        }
    }
}

impl SolverConfig {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.picard_max_iters == 0 || self.corrector_iters == 0 {
            return Err(Error::InvalidParams(
                "n, picard_max_iters and corrector_iters must be positive".into(),
            ));
        }
        if !(self.picard_tol > 0.0 && self.picard_tol < 1.0) {
            return Err(Error::InvalidParams(format!(
                "picard_tol must lie in (0, 1), got {}",
                self.picard_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Picard,
    ProductStep,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "picard" => Ok(Method::Picard),
            "step" | "product_step" => Ok(Method::ProductStep),
            other => Err(Error::InvalidParams(format!("unknown method `{other}`"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Picard => "picard",
            Method::ProductStep => "product_step",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub grid_fn: GridFunction,
    /// Picard sweeps, or corrector passes per node for the marching scheme.
    pub iterations_used: usize,
    /// Largest observed ratio of successive fixed-point updates.
    pub contraction_estimate: f64,
    /// Every observed update ratio, in order.
    pub ratios: Vec<f64>,
    pub method: Method,
    /// Max difference to the half-grid solution at shared nodes (0 if not computed).
    pub error_estimate: f64,
}

/// `e^{-sigma t^rho} sum_k b_k t^{rho k} / k!` on `grid`.
pub fn initial_term(problem: &IvpProblem, grid: Arc<Grid>) -> Result<GridFunction> {
    taylor_term(
        &problem.params,
        &problem.initial,
        &GridFunction::zeros(grid),
    )
}

/// Precomputed discrete Volterra operator on one grid.
struct Discrete<'a> {
    problem: &'a IvpProblem,
    grid: Arc<Grid>,
    weights: ProductWeights,
    /// `e^{sigma u_i}`
    up: Vec<f64>,
    /// `e^{-sigma u_i}`
    down: Vec<f64>,
    init: Vec<f64>,
}

impl<'a> Discrete<'a> {
    fn new(problem: &'a IvpProblem, grid: Arc<Grid>) -> Result<Self> {
        let p = &problem.params;
        let weights = ProductWeights::new(p.alpha(), grid.n(), grid.du())?;
        let up: Vec<f64> = grid.u().iter().map(|u| (p.sigma() * u).exp()).collect();
        if up.iter().any(|v| !v.is_finite() || *v == 0.0) {
            return Err(Error::Overflow(format!(
                "e^(sigma u) leaves the floating-point range for sigma = {}",
                p.sigma()
            )));
        }
        let down = up.iter().map(|v| 1.0 / v).collect();
        let init = initial_term(problem, grid.clone())?.into_values();
        Ok(Self {
            problem,
            grid,
            weights,
            up,
            down,
            init,
        })
    }

    /// `e^{sigma u_i} f(t_i, y)`, checked for finiteness.
    fn g(&self, i: usize, y: f64) -> Result<f64> {
        let t = self.grid.nodes()[i];
        let v = self.problem.rhs.eval(t, y);
        if !v.is_finite() {
            return Err(Error::NonFiniteRhs { t, y });
        }
        Ok(self.up[i] * v)
    }

    fn apply(&self, psi: &[f64]) -> Result<Vec<f64>> {
        let g = psi
            .iter()
            .enumerate()
            .map(|(i, &y)| self.g(i, y))
            .collect::<Result<Vec<_>>>()?;
        let w = &self.weights;
        let mut out = self.init.clone();
        for i in 1..out.len() {
            out[i] += self.down[i] * w.trap_scale() * (w.trap_history(i, &g) + g[i]);
        }
        Ok(out)
    }
}

/// `E psi` on the grid of `psi`.
pub fn volterra_rhs_apply(problem: &IvpProblem, psi: &GridFunction) -> Result<GridFunction> {
    psi.grid().check_params(&problem.params)?;
    let op = Discrete::new(problem, psi.grid().clone())?;
    GridFunction::new(psi.grid().clone(), op.apply(psi.values())?)
}

fn horizon_grid(
    problem: &IvpProblem,
    h: f64,
    n: usize,
    policy: HorizonPolicy,
) -> Result<Arc<Grid>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParams(format!(
            "horizon must be positive, got {h}"
        )));
    }
    if policy == HorizonPolicy::Enforce {
        let strict = problem.h_tilde_limit()?;
        let h_max = problem.hyp.h_star.min(problem.tube_limit()?).min(strict);
        if h > h_max || h >= strict {
            return Err(Error::OutsideExistence { h, h_max });
        }
    }
    Ok(Arc::new(Grid::new(0.0, h, problem.params.rho(), n)?))
}

/// Ratios below this change size are dominated by rounding and not recorded.
fn rounding_floor(scale: f64) -> f64 {
    1e3 * f64::EPSILON * scale.max(1.0)
}

fn picard_on(problem: &IvpProblem, grid: Arc<Grid>, cfg: &SolverConfig) -> Result<Solution> {
    let op = Discrete::new(problem, grid.clone())?;
    let mut psi = op.init.clone();
    let mut ratios = Vec::new();
    let mut prev: Option<f64> = None;
    let mut last_ratio = f64::NAN;
    for iter in 1..=cfg.picard_max_iters {
        let next = op.apply(&psi)?;
        let diff = next
            .iter()
            .zip(&psi)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let norm = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if let Some(p) = prev {
            if p > rounding_floor(norm) && diff > rounding_floor(norm) {
                last_ratio = diff / p;
                ratios.push(last_ratio);
            }
        }
        prev = Some(diff);
        psi = next;
        if diff <= cfg.picard_tol * norm.max(1.0) {
            let contraction_estimate = ratios.iter().cloned().fold(0.0, f64::max);
            return Ok(Solution {
                grid_fn: GridFunction::new(grid, psi)?,
                iterations_used: iter,
                contraction_estimate,
                ratios,
                method: Method::Picard,
                error_estimate: 0.0,
            });
        }
        if !diff.is_finite() {
            break;
        }
    }
    Err(Error::PicardNonConvergence {
        iterations: cfg.picard_max_iters,
        last_ratio,
    })
}

fn step_on(problem: &IvpProblem, grid: Arc<Grid>, cfg: &SolverConfig) -> Result<Solution> {
    let op = Discrete::new(problem, grid.clone())?;
    let w = &op.weights;
    let n = grid.n();
    let mut psi = vec![0.0; n + 1];
    let mut g = vec![0.0; n + 1];
    psi[0] = op.init[0];
    g[0] = op.g(0, psi[0])?;
    let mut ratios = Vec::new();
    for i in 1..=n {
        let predictor = op.init[i] + op.down[i] * w.rect_scale() * w.rect_history(i, &g);
        let history = w.trap_history(i, &g);
        let mut y = predictor;
        let mut prev_update: Option<f64> = None;
        for _ in 0..cfg.corrector_iters {
            let gi = op.g(i, y)?;
            let next = op.init[i] + op.down[i] * w.trap_scale() * (history + gi);
            let update = (next - y).abs();
            if let Some(p) = prev_update {
                let floor = rounding_floor(next.abs());
                if p > floor && update > floor {
                    let r = update / p;
                    if r > 1.0 {
                        return Err(Error::CorrectorDivergence { node: i });
                    }
                    ratios.push(r);
                }
            }
            if !next.is_finite() {
                return Err(Error::CorrectorDivergence { node: i });
            }
            prev_update = Some(update);
            y = next;
        }
        psi[i] = y;
        g[i] = op.g(i, y)?;
    }
    let contraction_estimate = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(Solution {
        grid_fn: GridFunction::new(grid, psi)?,
        iterations_used: cfg.corrector_iters,
        contraction_estimate,
        ratios,
        method: Method::ProductStep,
        error_estimate: 0.0,
    })
}

fn with_error_estimate(
    problem: &IvpProblem,
    h: f64,
    cfg: &SolverConfig,
    mut fine: Solution,
    run: fn(&IvpProblem, Arc<Grid>, &SolverConfig) -> Result<Solution>,
) -> Result<Solution> {
    if cfg.estimate_error && cfg.n >= 4 && cfg.n % 2 == 0 {
        let coarse_grid = Arc::new(Grid::new(0.0, h, problem.params.rho(), cfg.n / 2)?);
        let coarse = run(problem, coarse_grid, cfg)?;
        fine.error_estimate = coarse
            .grid_fn
            .values()
            .iter()
            .zip(fine.grid_fn.values().iter().step_by(2))
            .fold(0.0, |m, (c, f)| m.max((c - f).abs()));
    }
    Ok(fine)
}

/// Picard iteration of the Volterra operator on `[0, h]`, starting from the initial-data term.
pub fn solve_picard(problem: &IvpProblem, h: f64, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let grid = horizon_grid(problem, h, cfg.n, cfg.horizon)?;
    let fine = picard_on(problem, grid, cfg)?;
    with_error_estimate(problem, h, cfg, fine, picard_on)
}

/// Node-by-node product-integration march on `[0, h]`.
pub fn solve_product_step(problem: &IvpProblem, h: f64, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let grid = horizon_grid(problem, h, cfg.n, cfg.horizon)?;
    let fine = step_on(problem, grid, cfg)?;
    with_error_estimate(problem, h, cfg, fine, step_on)
}

pub fn solve(problem: &IvpProblem, h: f64, cfg: &SolverConfig, method: Method) -> Result<Solution> {
    match method {
        Method::Picard => solve_picard(problem, h, cfg),
        Method::ProductStep => solve_product_step(problem, h, cfg),
    }
}

/// The tube `{0 <= t <= h, |y - center(t)| <= radius}` around the initial-data term.
#[derive(Debug, Clone)]
pub struct TubeRegion {
    params: OperatorParams,
    initial: InitialData,
    h: f64,
    radius: f64,
}

impl TubeRegion {
    pub fn new(params: OperatorParams, initial: InitialData, h: f64, radius: f64) -> Result<Self> {
        if !(h > 0.0) || !(radius > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tube needs positive h and radius, got {h} and {radius}"
            )));
        }
        Ok(Self {
            params,
            initial,
            h,
            radius,
        })
    }

    pub fn for_problem(problem: &IvpProblem, h: f64) -> Result<Self> {
        Self::new(
            problem.params,
            problem.initial.clone(),
            h,
            problem.hyp.tube_radius,
        )
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Initial-data term at `t`.
    pub fn center(&self, t: f64) -> f64 {
        let u = t.powf(self.params.rho());
        let mut acc = 0.0;
        let mut term = 1.0;
        for (k, b) in self.initial.values().iter().enumerate() {
            if k > 0 {
                term *= u / k as f64;
            }
            acc += b * term;
        }
        acc * (-self.params.sigma() * u).exp()
    }
}

/// Largest difference quotient `|f(t,y1) - f(t,y2)| / |y1 - y2|` over a
/// `samples x samples` lattice of the tube. A lower bound on the Lipschitz constant.
pub fn lipschitz_probe(f: &Rhs, region: &TubeRegion, samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let last = (samples - 1) as f64;
    let mut best = 0.0f64;
    let mut ys = vec![0.0; samples];
    let mut fs = vec![0.0; samples];
    for i in 0..samples {
        let t = region.h * i as f64 / last;
        let c = region.center(t);
        for j in 0..samples {
            ys[j] = c - region.radius + 2.0 * region.radius * j as f64 / last;
            fs[j] = f.eval(t, ys[j]);
        }
        for j in 0..samples {
            for k in j + 1..samples {
                let q = (fs[k] - fs[j]).abs() / (ys[k] - ys[j]);
                if q.is_finite() {
                    best = best.max(q);
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{mittag_leffler, MlSeriesConfig};

    fn hyp(k: f64, h_star: f64, m: f64, l: f64) -> Hypotheses {
        Hypotheses {
            tube_radius: k,
            h_star,
            rhs_bound: m,
            lipschitz: l,
        }
    }

    fn problem(
        sigma: f64,
        rho: f64,
        alpha: f64,
        rhs: Rhs,
        b: Vec<f64>,
        h: Hypotheses,
    ) -> IvpProblem {
        let p = OperatorParams::new(sigma, rho, alpha, 0.0).unwrap();
        IvpProblem::new(p, rhs, InitialData::new(b).unwrap(), h).unwrap()
    }

    fn loose() -> Hypotheses {
        hyp(10.0, 10.0, 1.0, 1.0)
    }

    fn allow(n: usize) -> SolverConfig {
        SolverConfig {
            horizon: HorizonPolicy::Allow,
            ..SolverConfig::with_n(n)
        }
    }

    #[test]
    fn existence_h_examples() {
        let p = problem(1.0, 2.0, 0.5, Rhs::Zero, vec![1.0], hyp(1.0, 1.0, 2.0, 1.0));
        let h = existence_h(&p, 0.88).unwrap();
        assert!((h - 0.443_113_5).abs() < 1e-7, "{h}");

        let p = problem(
            1.0,
            2.0,
            0.5,
            Rhs::Zero,
            vec![1.0],
            hyp(1.0, 1.0, 1e-12, 1.0),
        );
        assert_eq!(existence_h(&p, 0.7).unwrap(), 0.7);

        let p = problem(
            0.0,
            1.0,
            1.0,
            Rhs::Zero,
            vec![1.0],
            hyp(2.0, 10.0, 2.0, 0.5),
        );
        assert_eq!(existence_h(&p, 1.9).unwrap(), 1.0);
    }

    #[test]
    fn existence_h_is_strict_in_h_tilde() {
        // limit = (Gamma(2)/0.5)^1 = 2 exactly
        let p = problem(
            0.0,
            1.0,
            1.0,
            Rhs::Zero,
            vec![1.0],
            hyp(2.0, 10.0, 2.0, 0.5),
        );
        assert!(matches!(
            existence_h(&p, 2.0),
            Err(Error::InvalidHTilde { .. })
        ));
        assert!(existence_h(&p, 2.0 - 1e-12).is_ok());
        assert!(existence_h(&p, 0.0).is_err());
    }

    #[test]
    fn problem_validation() {
        let p = OperatorParams::new(1.0, 1.0, 0.5, 0.5).unwrap();
        let b = InitialData::new(vec![1.0]).unwrap();
        assert!(IvpProblem::new(p, Rhs::Zero, b.clone(), loose()).is_err());
        let p = OperatorParams::new(1.0, 1.0, 1.5, 0.0).unwrap();
        assert!(IvpProblem::new(p, Rhs::Zero, b.clone(), loose()).is_err());
        let p = OperatorParams::new(1.0, 1.0, 0.5, 0.0).unwrap();
        assert!(IvpProblem::new(p, Rhs::Zero, b, hyp(0.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn rhs_parsing() {
        assert!(matches!("zero".parse::<Rhs>().unwrap(), Rhs::Zero));
        assert!(matches!("linear:0.9".parse::<Rhs>().unwrap(), Rhs::Linear(l) if l == 0.9));
        assert!(matches!(
            "shifted:0.9:0.01".parse::<Rhs>().unwrap(),
            Rhs::Shifted { lambda, c } if lambda == 0.9 && c == 0.01
        ));
        assert!("linear:x".parse::<Rhs>().is_err());
        assert!("cubic".parse::<Rhs>().is_err());
        assert_eq!(Rhs::Linear(0.9).to_string(), "linear:0.9");
    }

    #[test]
    fn zero_force_reproduces_initial_term() {
        let p = problem(1.3, 0.8, 0.5, Rhs::Zero, vec![1.0], loose());
        for method in [Method::Picard, Method::ProductStep] {
            let s = solve(&p, 1.0, &allow(64), method).unwrap();
            for (t, v) in s.grid_fn.grid().nodes().iter().zip(s.grid_fn.values()) {
                assert!((v - (-1.3 * t.powf(0.8)).exp()).abs() < 1e-15);
            }
        }
        let p = problem(0.0, 1.0, 1.5, Rhs::Zero, vec![1.0, 1.0], loose());
        let s = solve_picard(&p, 2.0, &allow(32)).unwrap();
        for (t, v) in s.grid_fn.grid().nodes().iter().zip(s.grid_fn.values()) {
            assert!((v - (1.0 + t)).abs() < 1e-14);
        }
    }

    #[test]
    fn apply_with_zero_data_and_unit_force() {
        let p = problem(
            1.0,
            2.0,
            0.5,
            Rhs::Shifted {
                lambda: 0.0,
                c: 1.0,
            },
            vec![0.0],
            loose(),
        );
        let grid = Arc::new(Grid::new(0.0, 1.0, 2.0, 256).unwrap());
        let psi = GridFunction::zeros(grid);
        let out = volterra_rhs_apply(&p, &psi).unwrap();
        let direct = crate::operators::direct::substantial_integral_direct(
            p.params(),
            |_| 1.0,
            1.0,
            &Default::default(),
        )
        .unwrap();
        assert!(
            (out.last() - direct).abs() < 1e-5,
            "{} vs {direct}",
            out.last()
        );
    }

    #[test]
    fn classical_relaxation() {
        // sigma = 0, rho = 1: psi = E_{1/2}(t^{1/2})
        let p = problem(0.0, 1.0, 0.5, Rhs::Linear(1.0), vec![1.0], loose());
        let exact = mittag_leffler(0.5, 0.5f64.sqrt(), &MlSeriesConfig::default()).unwrap();
        for method in [Method::Picard, Method::ProductStep] {
            let s = solve(&p, 0.5, &allow(1024), method).unwrap();
            assert!(
                (s.grid_fn.last() - exact).abs() < 5e-3,
                "{method}: {}",
                s.grid_fn.last()
            );
        }
    }

    #[test]
    fn horizon_enforcement() {
        let p = problem(
            1.0,
            0.5,
            0.5,
            Rhs::Linear(0.9),
            vec![1.0],
            hyp(10.0, 10.0, 1.0, 0.9),
        );
        let cfg = SolverConfig::with_n(64);
        assert!(matches!(
            solve_picard(&p, 1.0, &cfg),
            Err(Error::OutsideExistence { .. })
        ));
        assert!(solve_picard(&p, 0.5, &cfg).is_ok());
        assert!(solve_picard(&p, 1.0, &allow(64)).is_ok());
    }

    #[test]
    fn picard_reports_non_convergence() {
        let p = problem(0.0, 1.0, 0.5, Rhs::Linear(1.0), vec![1.0], loose());
        let cfg = SolverConfig {
            picard_max_iters: 3,
            ..allow(32)
        };
        assert!(matches!(
            solve_picard(&p, 1.0, &cfg),
            Err(Error::PicardNonConvergence { iterations: 3, .. })
        ));
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let rhs = Rhs::custom(|_, y| 1.0 / (y - 1.0));
        let p = problem(0.0, 1.0, 0.5, rhs, vec![1.0], loose());
        assert!(matches!(
            solve_picard(&p, 1.0, &allow(8)),
            Err(Error::NonFiniteRhs { .. })
        ));
    }

    #[test]
    fn lipschitz_probe_examples() {
        let region = TubeRegion::new(
            OperatorParams::new(1.0, 0.5, 0.5, 0.0).unwrap(),
            InitialData::new(vec![1.0]).unwrap(),
            1.0,
            1.0,
        )
        .unwrap();
        let l = lipschitz_probe(&Rhs::Linear(0.9), &region, 16).unwrap();
        assert!((l - 0.9).abs() < 1e-12);
        assert_eq!(
            lipschitz_probe(
                &Rhs::Shifted {
                    lambda: 0.0,
                    c: 3.0
                },
                &region,
                8
            )
            .unwrap(),
            0.0
        );
        assert!(lipschitz_probe(&Rhs::Zero, &region, 1).is_err());
    }
}
