//! Operator parameters, u-uniform grids and sampled functions.
//!
//! Every operator in this crate is evaluated in the variable `u = t^rho`.
//! In that variable the generalized substantial integral becomes
//! `e^{-sigma u} I^alpha_u [e^{sigma u} f]`, a plain Riemann-Liouville
//! integral with a pure power kernel, so grids are uniform in `u` rather
//! than in `t`.

use std::sync::Arc;

use crate::error::{Error, Result};

/// `(sigma, rho, alpha)` together with the lower limit `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    sigma: f64,
    rho: f64,
    alpha: f64,
    a: f64,
}

impl OperatorParams {
    pub fn new(sigma: f64, rho: f64, alpha: f64, a: f64) -> Result<Self> {
        if !sigma.is_finite() {
            return Err(Error::InvalidParams(format!(
                "sigma must be finite, got {sigma}"
            )));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParams(format!(
                "rho must be positive, got {rho}"
            )));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidParams(format!(
                "lower limit a must be non-negative, got {a}"
            )));
        }
        Ok(Self {
            sigma,
            rho,
            alpha,
            a,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `m = ceil(alpha)`, so that `m - 1 < alpha <= m`.
    pub fn m(&self) -> usize {
        self.alpha.ceil() as usize
    }

    pub fn is_integer_order(&self) -> bool {
        self.alpha == self.alpha.floor()
    }

    /// Same `sigma`, `rho`, `a` with a different order.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.sigma, self.rho, alpha, self.a)
    }

    pub fn to_u(&self, t: f64) -> Result<f64> {
        to_u(t, self.rho)
    }

    pub fn from_u(&self, u: f64) -> Result<f64> {
        from_u(u, self.rho)
    }

    /// `a^rho`.
    pub fn u_a(&self) -> f64 {
        self.a.powf(self.rho)
    }
}

/// `t^rho` for `t >= 0`.
pub fn to_u(t: f64, rho: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("to_u requires t >= 0, got {t}")));
    }
    Ok(t.powf(rho))
}

/// `u^(1/rho)` for `u >= 0`.
pub fn from_u(u: f64, rho: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("from_u requires u >= 0, got {u}")));
    }
    Ok(u.powf(1.0 / rho))
}

/// Nodes `t_0 = a < t_1 < ... < t_n = t_end` with `u_i = t_i^rho` equally spaced.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    t_end: f64,
    rho: f64,
    n: usize,
    du: f64,
    nodes: Vec<f64>,
    u: Vec<f64>,
}

impl Grid {
    pub fn new(a: f64, t_end: f64, rho: f64, n: usize) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "lower limit must be >= 0, got {a}"
            )));
        }
        if !(t_end > a) || !t_end.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "t_end = {t_end} must exceed a = {a}"
            )));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "rho must be positive, got {rho}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidGrid("need at least one interval".into()));
        }
        let u0 = to_u(a, rho)?;
        let un = to_u(t_end, rho)?;
        let du = (un - u0) / n as f64;
        if !(du > 0.0) || !du.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "degenerate u-spacing {du} on [{a}, {t_end}] with rho = {rho}"
            )));
        }
        let mut u: Vec<f64> = (0..=n).map(|i| u0 + i as f64 * du).collect();
        u[n] = un;
        let mut nodes = u
            .iter()
            .map(|&ui| from_u(ui, rho))
            .collect::<Result<Vec<_>>>()?;
        nodes[0] = a;
        nodes[n] = t_end;
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid(format!(
                "nodes are not strictly increasing for n = {n} on [{a}, {t_end}]"
            )));
        }
        Ok(Self {
            a,
            t_end,
            rho,
            n,
            du,
            nodes,
            u,
        })
    }

    /// Grid matching the lower limit and `rho` of `params`.
    pub fn for_params(params: &OperatorParams, t_end: f64, n: usize) -> Result<Self> {
        Self::new(params.a(), t_end, params.rho(), n)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Constant spacing in `u`.
    pub fn du(&self) -> f64 {
        self.du
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn matches(&self, params: &OperatorParams) -> bool {
        self.a == params.a() && self.rho == params.rho()
    }

    pub(crate) fn check_params(&self, params: &OperatorParams) -> Result<()> {
        if self.matches(params) {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!(
                "grid (a = {}, rho = {}) does not match operator (a = {}, rho = {})",
                self.a,
                self.rho,
                params.a(),
                params.rho()
            )))
        }
    }
}

/// Samples of a function at the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidData(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite sample {} at node {i} (t = {})",
                values[i],
                grid.nodes()[i]
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(t_i)` at every node.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Max absolute value over the nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::InvalidGrid(
                "grid functions live on different grids".into(),
            ))
        }
    }

    /// `max_i |self_i - other_i|`.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `c1 * self + c2 * other`.
    pub fn combine(&self, c1: f64, other: &GridFunction, c2: f64) -> Result<GridFunction> {
        self.same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| c1 * a + c2 * b)
            .collect();
        GridFunction::new(self.grid.clone(), values)
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| f(t, v))
            .collect();
        GridFunction::new(self.grid.clone(), values)
    }

    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values)
    }
}

/// Sign of the exponent in [`conjugate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Pointwise `e^{sign * sigma * t_i^rho} f(t_i)`.
pub fn conjugate(f: &GridFunction, sign: Sign, params: &OperatorParams) -> Result<GridFunction> {
    let s = sign.factor() * params.sigma();
    if s == 0.0 {
        return Ok(f.clone());
    }
    let grid = f.grid();
    let mut values = Vec::with_capacity(f.values.len());
    for (&u, &v) in grid.u().iter().zip(&f.values) {
        let w = (s * u).exp() * v;
        if !w.is_finite() {
            return Err(Error::Overflow(format!(
                "e^({s} * {u}) overflows while conjugating"
            )));
        }
        values.push(w);
    }
    GridFunction::from_raw(grid.clone(), values)
}

/// The power-exponential family `(t^rho - a^rho)^beta e^{-sigma t^rho}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerExpSpec {
    beta: f64,
    params: OperatorParams,
}

impl PowerExpSpec {
    pub fn new(beta: f64, params: OperatorParams) -> Result<Self> {
        if !(beta > -1.0) || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "beta must exceed -1, got {beta}"
            )));
        }
        Ok(Self { beta, params })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    /// Evaluates the function at `t >= a`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        power_exp_eval(self, t)
    }

    /// Samples on `grid`, which must share `a` and `rho` with the spec.
    pub fn sample(&self, grid: Arc<Grid>) -> Result<GridFunction> {
        grid.check_params(&self.params)?;
        let values = grid
            .nodes()
            .iter()
            .map(|&t| self.eval(t))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(grid, values)
    }
}

/// `(t^rho - a^rho)^beta e^{-sigma t^rho}`.
pub fn power_exp_eval(spec: &PowerExpSpec, t: f64) -> Result<f64> {
    let p = &spec.params;
    if t < p.a() {
        return Err(Error::Domain(format!(
            "power_exp needs t >= a = {}, got {t}",
            p.a()
        )));
    }
    let u = p.to_u(t)?;
    let base = (u - p.u_a()).max(0.0);
    let power = if spec.beta == 0.0 {
        1.0
    } else {
        base.powf(spec.beta)
    };
    Ok(power * (-p.sigma() * u).exp())
}
