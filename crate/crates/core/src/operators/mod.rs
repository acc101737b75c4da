//! Generalized substantial fractional integral and derivatives on u-grids.
//!
//! The integral is evaluated through the conjugation identity
//!
//! ```text
//! sI^{alpha,rho}_a f = e^{-sigma u} I^alpha_u [ e^{sigma u} f ],   u = t^rho
//! ```
//!
//! where `I^alpha_u` is the classical Riemann-Liouville integral in `u`,
//! computed by product integration. The first-order operator
//! `(t^{1-rho}/rho d/dt + sigma)` is `d/du + sigma` and is applied with finite
//! differences in `u`. Derivatives compose the two:
//!
//! * Riemann-Liouville type: `sD^{m,rho} sI^{m-alpha,rho}`
//! * Caputo type: `sI^{m-alpha,rho} sD^{m,rho}`
//!
//! Values near `t = a` carry the reduced accuracy of the one-sided stencils.

pub mod direct;
mod weights;

pub(crate) use weights::ProductWeights;
pub use weights::Scheme;

use crate::error::{Error, Result};
use crate::grid::{conjugate, GridFunction, OperatorParams, PowerExpSpec, Sign};
use crate::special::{gamma, reciprocal_gamma};

/// Quadrature settings for the fractional integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    scheme: Scheme,
    n_min: usize,
}

impl QuadratureConfig {
    pub fn new(scheme: Scheme, n_min: usize) -> Result<Self> {
        if n_min < 2 {
            return Err(Error::InvalidParams(format!(
                "n_min must be >= 2, got {n_min}"
            )));
        }
        Ok(Self { scheme, n_min })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn n_min(&self) -> usize {
        self.n_min
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::ProductTrapezoid,
            n_min: 2,
        }
    }
}

/// Values `b_k = sD^{k,rho} f(a)`, `k = 0..m-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    b: Vec<f64>,
}

impl InitialData {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidData(
                "initial data needs at least one value".into(),
            ));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("initial data must be finite".into()));
        }
        Ok(Self { b })
    }

    pub fn values(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub(crate) fn check_order(&self, params: &OperatorParams) -> Result<()> {
        if self.b.len() == params.m() {
            Ok(())
        } else {
            Err(Error::InvalidData(format!(
                "alpha = {} needs {} initial values, got {}",
                params.alpha(),
                params.m(),
                self.b.len()
            )))
        }
    }

    /// Exact `sD^{k,rho} f(a)` for a power-exponential `f`.
    ///
    /// `sD^{k,rho}[(u - u_a)^beta e^{-sigma u}] = beta (beta-1)...(beta-k+1) (u - u_a)^{beta-k} e^{-sigma u}`,
    /// which at `u = u_a` is `k! e^{-sigma u_a}` when `beta = k`, zero when
    /// `beta > k` or `beta` is an integer below `k`, and unbounded otherwise.
    pub fn for_power_exp(spec: &PowerExpSpec, m: usize) -> Result<Self> {
        let p = spec.params();
        let beta = spec.beta();
        let scale = (-p.sigma() * p.u_a()).exp();
        let mut b = Vec::with_capacity(m);
        for k in 0..m {
            let kf = k as f64;
            let value = if beta == kf {
                gamma(kf + 1.0)? * scale
            } else if beta > kf || (beta == beta.floor() && beta >= 0.0) {
                0.0
            } else {
                return Err(Error::Domain(format!(
                    "sD^{k} of the power {beta} is unbounded at t = a"
                )));
            };
            b.push(value);
        }
        Self::new(b)
    }

    /// One-sided (first-order) estimate of `sD^{k,rho} f(a)` from samples.
    pub fn from_samples(params: &OperatorParams, f: &GridFunction, m: usize) -> Result<Self> {
        let mut b = Vec::with_capacity(m);
        for k in 0..m {
            let dk = if k == 0 {
                f.clone()
            } else {
                sigma_d_m_rho(params, f, k)?
            };
            b.push(dk.values()[0]);
        }
        Self::new(b)
    }
}

fn check_grid(params: &OperatorParams, f: &GridFunction, cfg: &QuadratureConfig) -> Result<()> {
    f.grid().check_params(params)?;
    if f.grid().n() < cfg.n_min {
        return Err(Error::GridTooSmall {
            need: cfg.n_min + 1,
            have: f.grid().len(),
        });
    }
    Ok(())
}

/// Generalized substantial integral of order `params.alpha()` at every node.
pub fn substantial_integral(
    params: &OperatorParams,
    f: &GridFunction,
    cfg: &QuadratureConfig,
) -> Result<GridFunction> {
    substantial_integral_of_order(params, params.alpha(), f, cfg)
}

/// Generalized substantial integral of an arbitrary order `>= 0` (order 0 is the identity).
pub fn substantial_integral_of_order(
    params: &OperatorParams,
    order: f64,
    f: &GridFunction,
    cfg: &QuadratureConfig,
) -> Result<GridFunction> {
    check_grid(params, f, cfg)?;
    if !(order >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "integral order must be >= 0, got {order}"
        )));
    }
    if order == 0.0 {
        return Ok(f.clone());
    }
    let g = conjugate(f, Sign::Plus, params)?;
    let raw = weights::rl_integral(order, g.values(), f.grid().du(), cfg.scheme)?;
    let integral = GridFunction::new(f.grid().clone(), raw)?;
    conjugate(&integral, Sign::Minus, params)
}

/// Closed form `Gamma(beta+1)/Gamma(alpha+beta+1) e^{-sigma t^rho} (t^rho - a^rho)^{alpha+beta}`.
pub fn substantial_integral_power(spec: &PowerExpSpec, alpha: f64, t: f64) -> Result<f64> {
    let p = spec.params();
    if !(alpha > 0.0) {
        return Err(Error::InvalidParams(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if t < p.a() {
        return Err(Error::Domain(format!(
            "t = {t} below lower limit {}",
            p.a()
        )));
    }
    let beta = spec.beta();
    let u = p.to_u(t)?;
    let span = (u - p.u_a()).max(0.0);
    let coef = gamma(beta + 1.0)? * reciprocal_gamma(alpha + beta + 1.0);
    Ok(coef * (-p.sigma() * u).exp() * span.powf(alpha + beta))
}

/// Closed form of the Riemann-Liouville type derivative of a power-exponential,
/// `Gamma(beta+1)/Gamma(beta-alpha+1) e^{-sigma t^rho} (t^rho - a^rho)^{beta-alpha}`.
pub fn substantial_rl_derivative_power(spec: &PowerExpSpec, alpha: f64, t: f64) -> Result<f64> {
    let p = spec.params();
    if t < p.a() {
        return Err(Error::Domain(format!(
            "t = {t} below lower limit {}",
            p.a()
        )));
    }
    let beta = spec.beta();
    let u = p.to_u(t)?;
    let span = (u - p.u_a()).max(0.0);
    let coef = gamma(beta + 1.0)? * reciprocal_gamma(beta - alpha + 1.0);
    if coef == 0.0 {
        return Ok(0.0);
    }
    Ok(coef * (-p.sigma() * u).exp() * span.powf(beta - alpha))
}

/// Closed form of the Caputo type derivative of a power-exponential.
///
/// Integer powers below `m` are annihilated; powers above `m - 1` share the
/// Riemann-Liouville closed form.
pub fn substantial_caputo_derivative_power(spec: &PowerExpSpec, alpha: f64, t: f64) -> Result<f64> {
    let m = alpha.ceil();
    let beta = spec.beta();
    if beta >= 0.0 && beta == beta.floor() && beta < m {
        return Ok(0.0);
    }
    if beta > m - 1.0 {
        return substantial_rl_derivative_power(spec, alpha, t);
    }
    Err(Error::Domain(format!(
        "Caputo derivative of order {alpha} of the power {beta} is not defined"
    )))
}

/// `(d/du + sigma) f` with second-order differences: central inside, one-sided at the ends.
fn sigma_d_once(sigma: f64, values: &[f64], du: f64) -> Vec<f64> {
    let n = values.len() - 1;
    let mut out = vec![0.0; n + 1];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * du);
    out[n] = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * du);
    for i in 1..n {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * du);
    }
    for (o, v) in out.iter_mut().zip(values) {
        *o += sigma * v;
    }
    out
}

/// `sD^{m,rho} = (t^{1-rho}/rho d/dt + sigma)^m`, applied as `(d/du + sigma)^m`.
pub fn sigma_d_m_rho(params: &OperatorParams, f: &GridFunction, m: usize) -> Result<GridFunction> {
    f.grid().check_params(params)?;
    if f.grid().len() < m + 2 {
        return Err(Error::GridTooSmall {
            need: m + 2,
            have: f.grid().len(),
        });
    }
    let du = f.grid().du();
    let mut values = f.values().to_vec();
    for _ in 0..m {
        values = sigma_d_once(params.sigma(), &values, du);
    }
    GridFunction::new(f.grid().clone(), values)
}

/// Riemann-Liouville type generalized substantial derivative `sD^{m,rho} sI^{m-alpha,rho} f`.
pub fn substantial_rl_derivative(
    params: &OperatorParams,
    f: &GridFunction,
    cfg: &QuadratureConfig,
) -> Result<GridFunction> {
    let m = params.m();
    let inner = substantial_integral_of_order(params, m as f64 - params.alpha(), f, cfg)?;
    sigma_d_m_rho(params, &inner, m)
}

/// Caputo type generalized substantial derivative `sI^{m-alpha,rho} sD^{m,rho} f`.
pub fn substantial_caputo_derivative(
    params: &OperatorParams,
    f: &GridFunction,
    cfg: &QuadratureConfig,
) -> Result<GridFunction> {
    let m = params.m();
    let inner = sigma_d_m_rho(params, f, m)?;
    substantial_integral_of_order(params, m as f64 - params.alpha(), &inner, cfg)
}

/// `sum_k b_k / k! e^{-sigma (t^rho - a^rho)} (t^rho - a^rho)^k` on the grid of `like`.
pub fn taylor_term(
    params: &OperatorParams,
    data: &InitialData,
    like: &GridFunction,
) -> Result<GridFunction> {
    let ua = params.u_a();
    let grid = like.grid().clone();
    let values = grid
        .u()
        .iter()
        .map(|&u| {
            let d = (u - ua).max(0.0);
            let mut fact = 1.0;
            let mut pow = 1.0;
            let mut acc = 0.0;
            for (k, bk) in data.values().iter().enumerate() {
                if k > 0 {
                    fact *= k as f64;
                    pow *= d;
                }
                acc += bk / fact * pow;
            }
            acc * (-params.sigma() * d).exp()
        })
        .collect();
    GridFunction::new(grid, values)
}

/// `sI^alpha (sD^alpha_caputo f) + sum_k b_k/k! e^{-sigma(t^rho-a^rho)} (t^rho-a^rho)^k`,
/// which reproduces `f` when `data` holds `sD^{k,rho} f(a)`.
pub fn caputo_taylor_reconstruct(
    params: &OperatorParams,
    f: &GridFunction,
    data: &InitialData,
    cfg: &QuadratureConfig,
) -> Result<GridFunction> {
    data.check_order(params)?;
    let caputo = substantial_caputo_derivative(params, f, cfg)?;
    let integral = substantial_integral(params, &caputo, cfg)?;
    let taylor = taylor_term(params, data, f)?;
    integral.combine(1.0, &taylor, 1.0)
}

/// `sI^alpha sD^alpha f` for `0 < alpha < 1`.
///
/// For `f` bounded at `a` this equals `f`; otherwise it differs from `f` by
/// [`rl_inversion_correction`].
pub fn rl_inversion_remainder(
    params: &OperatorParams,
    f: &GridFunction,
    cfg: &QuadratureConfig,
) -> Result<GridFunction> {
    if !(params.alpha() > 0.0 && params.alpha() < 1.0) {
        return Err(Error::InvalidParams(format!(
            "inversion remainder needs 0 < alpha < 1, got {}",
            params.alpha()
        )));
    }
    let d = substantial_rl_derivative(params, f, cfg)?;
    substantial_integral(params, &d, cfg)
}

/// Correction `e^{-sigma(t^rho - a^rho)} (t^rho - a^rho)^{alpha-1} / Gamma(alpha) * limit`,
/// where `limit = lim_{s -> a+} sI^{1-alpha} f(s)`; valid for `0 < alpha < 1`, `t > a`.
pub fn rl_inversion_correction(params: &OperatorParams, limit: f64, t: f64) -> Result<f64> {
    let d = params.to_u(t)? - params.u_a();
    if !(d > 0.0) {
        return Err(Error::Domain(format!(
            "correction term is singular at t = {t}"
        )));
    }
    Ok((-params.sigma() * d).exp()
        * d.powf(params.alpha() - 1.0)
        * reciprocal_gamma(params.alpha())
        * limit)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grid::Grid;

    fn params(sigma: f64, rho: f64, alpha: f64, a: f64) -> OperatorParams {
        OperatorParams::new(sigma, rho, alpha, a).unwrap()
    }

    fn power(beta: f64, p: OperatorParams, t_end: f64, n: usize) -> (PowerExpSpec, GridFunction) {
        let spec = PowerExpSpec::new(beta, p).unwrap();
        let grid = Arc::new(Grid::for_params(&p, t_end, n).unwrap());
        let f = spec.sample(grid).unwrap();
        (spec, f)
    }

    #[test]
    fn integral_of_one_is_t() {
        let p = params(0.0, 1.0, 1.0, 0.0);
        let grid = Arc::new(Grid::for_params(&p, 2.0, 16).unwrap());
        let one = GridFunction::from_fn(grid, |_| 1.0).unwrap();
        let out = substantial_integral(&p, &one, &QuadratureConfig::default()).unwrap();
        for (t, v) in out.grid().nodes().iter().zip(out.values()) {
            assert!((t - v).abs() < 1e-13);
        }
        assert_eq!(out.values()[0], 0.0);
    }

    #[test]
    fn integral_power_examples() {
        let p = params(1.0, 2.0, 0.5, 0.0);
        let spec = PowerExpSpec::new(2.0, p).unwrap();
        let v = substantial_integral_power(&spec, 0.5, 1.0).unwrap();
        assert!((v - 0.221_390_7).abs() < 1e-6, "{v}");
        let spec = PowerExpSpec::new(1.0, params(0.0, 1.0, 1.0, 0.0)).unwrap();
        assert!((substantial_integral_power(&spec, 1.0, 2.0).unwrap() - 2.0).abs() < 1e-14);
        let spec = PowerExpSpec::new(0.0, params(0.0, 1.7, 1.0, 0.5)).unwrap();
        let t: f64 = 1.4;
        let want = t.powf(1.7) - 0.5f64.powf(1.7);
        assert!((substantial_integral_power(&spec, 1.0, t).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn integral_matches_closed_form_example() {
        let p = params(1.0, 2.0, 0.5, 0.0);
        let (spec, f) = power(2.0, p, 1.0, 512);
        let out = substantial_integral(&p, &f, &QuadratureConfig::default()).unwrap();
        let exact = substantial_integral_power(&spec, 0.5, 1.0).unwrap();
        assert!((out.last() - exact).abs() < 2e-4);
        assert!((out.last() - 0.221_410).abs() < 2e-4, "{}", out.last());
    }

    #[test]
    fn integral_rejects_mismatched_grid() {
        let p = params(1.0, 2.0, 0.5, 0.0);
        let q = params(1.0, 2.0, 0.5, 0.1);
        let (_, f) = power(2.0, q, 1.0, 16);
        assert!(matches!(
            substantial_integral(&p, &f, &QuadratureConfig::default()),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn sigma_d_examples() {
        let p = params(1.0, 2.0, 0.5, 0.0);
        let (_, f) = power(2.0, p, 1.2, 600);
        let d = sigma_d_m_rho(&p, &f, 1).unwrap();
        // 2 (t^2) e^{-t^2} at the node closest to t = 1
        let grid = d.grid();
        let i = grid.nodes().iter().position(|&t| t >= 1.0).unwrap();
        let t = grid.nodes()[i];
        let want = 2.0 * t * t * (-t * t).exp();
        assert!((d.values()[i] - want).abs() < 1e-5);

        let p0 = params(0.0, 1.0, 0.5, 0.0);
        let (_, lin) = power(1.0, p0, 1.0, 10);
        for v in sigma_d_m_rho(&p0, &lin, 1).unwrap().values() {
            assert!((v - 1.0).abs() < 1e-12);
        }

        let p2 = params(0.0, 1.5, 0.5, 0.0);
        let (_, u) = power(1.0, p2, 1.0, 10);
        let d2 = sigma_d_m_rho(&p2, &u, 2).unwrap();
        for v in &d2.values()[2..9] {
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn sigma_d_needs_enough_nodes() {
        let p = params(0.0, 1.0, 0.5, 0.0);
        let (_, f) = power(1.0, p, 1.0, 1);
        assert!(matches!(
            sigma_d_m_rho(&p, &f, 1),
            Err(Error::GridTooSmall { need: 3, have: 2 })
        ));
    }

    #[test]
    fn rl_and_caputo_on_power_exp() {
        let p = params(1.0, 2.0, 0.5, 0.0);
        let (spec, f) = power(2.0, p, 1.0, 1024);
        let cfg = QuadratureConfig::default();
        let exact = substantial_rl_derivative_power(&spec, 0.5, 1.0).unwrap();
        assert!((exact - 0.553_477).abs() < 1e-5, "{exact}");
        let rl = substantial_rl_derivative(&p, &f, &cfg).unwrap();
        let cap = substantial_caputo_derivative(&p, &f, &cfg).unwrap();
        assert!((rl.last() - exact).abs() < 5e-3);
        assert!((cap.last() - exact).abs() < 5e-3);
    }

    #[test]
    fn integer_order_derivative_reduces_to_sigma_d() {
        let p = params(0.7, 1.3, 1.0, 0.0);
        let (_, f) = power(2.0, p, 1.0, 64);
        let cfg = QuadratureConfig::default();
        let rl = substantial_rl_derivative(&p, &f, &cfg).unwrap();
        let sd = sigma_d_m_rho(&p, &f, 1).unwrap();
        assert!(rl.sup_distance(&sd).unwrap() < 1e-14);
    }

    #[test]
    fn caputo_kills_the_kernel_of_sigma_d() {
        let p = params(1.5, 2.0, 0.6, 0.0);
        let grid = Arc::new(Grid::for_params(&p, 1.0, 256).unwrap());
        let f = GridFunction::from_fn(grid, |t| 3.0 * (-1.5 * t * t).exp()).unwrap();
        let cap = substantial_caputo_derivative(&p, &f, &QuadratureConfig::default()).unwrap();
        // central differences of e^{-sigma u} are off by O(du^2), one-sided ends by O(du)
        assert!(cap.sup_norm() < 1e-2, "{}", cap.sup_norm());
    }

    #[test]
    fn classical_limit_matches_table_value() {
        let p = params(0.0, 1.0, 0.5, 0.0);
        let (_, f) = power(2.0, p, 1.0, 1024);
        let cfg = QuadratureConfig::default();
        let want = |t: f64| 2.0 / gamma(2.5).unwrap() * t.powf(1.5);
        let rl = substantial_rl_derivative(&p, &f, &cfg).unwrap();
        let cap = substantial_caputo_derivative(&p, &f, &cfg).unwrap();
        for (i, &t) in f.grid().nodes().iter().enumerate().skip(256) {
            assert!((rl.values()[i] - want(t)).abs() < 5e-3);
            assert!((cap.values()[i] - want(t)).abs() < 5e-3);
        }
    }

    #[test]
    fn taylor_reconstruction_small_cases() {
        let cfg = QuadratureConfig::default();
        // f = e^{-sigma (u - u_a)}: Caputo derivative vanishes, reconstruction is b_0 e^{...}
        let p = params(0.8, 1.5, 0.4, 0.3);
        let grid = Arc::new(Grid::for_params(&p, 1.5, 256).unwrap());
        let ua = p.u_a();
        let f = GridFunction::from_fn(grid, |t| (-0.8 * (t.powf(1.5) - ua)).exp()).unwrap();
        let data = InitialData::new(vec![1.0]).unwrap();
        let r = caputo_taylor_reconstruct(&p, &f, &data, &cfg).unwrap();
        assert!(r.sup_distance(&f).unwrap() < 1e-2);

        // classical: f(t) = t, alpha = 1/2
        let p = params(0.0, 1.0, 0.5, 0.0);
        let (spec, f) = power(1.0, p, 1.0, 256);
        let data = InitialData::for_power_exp(&spec, 1).unwrap();
        assert_eq!(data.values(), &[0.0]);
        let r = caputo_taylor_reconstruct(&p, &f, &data, &cfg).unwrap();
        assert!(r.sup_distance(&f).unwrap() < 1e-3);

        let bad = InitialData::new(vec![0.0, 0.0]).unwrap();
        assert!(caputo_taylor_reconstruct(&p, &f, &bad, &cfg).is_err());
    }

    #[test]
    fn initial_data_for_power_exp() {
        let p = params(1.0, 2.0, 1.5, 0.5);
        let scale = (-(0.25f64)).exp();
        let d = InitialData::for_power_exp(&PowerExpSpec::new(1.0, p).unwrap(), 2).unwrap();
        assert_eq!(d.values()[0], 0.0);
        assert!((d.values()[1] - scale).abs() < 1e-15);
        let d = InitialData::for_power_exp(&PowerExpSpec::new(0.0, p).unwrap(), 2).unwrap();
        assert!((d.values()[0] - scale).abs() < 1e-15);
        assert_eq!(d.values()[1], 0.0);
        assert!(InitialData::for_power_exp(&PowerExpSpec::new(0.5, p).unwrap(), 2).is_err());
    }

    #[test]
    fn initial_data_from_samples_is_first_order() {
        let p = params(1.0, 1.0, 1.5, 0.0);
        let spec = PowerExpSpec::new(1.0, p).unwrap();
        let exact = InitialData::for_power_exp(&spec, 2).unwrap();
        let mut errs = Vec::new();
        for n in [64, 128, 256] {
            let (_, f) = power(1.0, p, 1.0, n);
            let est = InitialData::from_samples(&p, &f, 2).unwrap();
            errs.push((est.values()[1] - exact.values()[1]).abs());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(errs[2] < 1e-2);
    }

    #[test]
    fn rl_inversion_remainder_cases() {
        let cfg = QuadratureConfig::default();
        let p = params(1.0, 2.0, 0.5, 0.0);
        let grid = Arc::new(Grid::for_params(&p, 1.0, 64).unwrap());
        let zero = GridFunction::zeros(grid);
        let r = rl_inversion_remainder(&p, &zero, &cfg).unwrap();
        assert_eq!(r.sup_norm(), 0.0);
        let p1 = params(1.0, 2.0, 1.5, 0.0);
        assert!(rl_inversion_remainder(&p1, &zero, &cfg).is_err());
    }

    #[test]
    fn rl_inversion_correction_reproduces_singular_power() {
        // f = (u - u_a)^{alpha-1} e^{-sigma u}: sI^{1-alpha} f = Gamma(alpha) e^{-sigma u},
        // whose limit at a is Gamma(alpha) e^{-sigma u_a}; the correction then equals f,
        // so sI^alpha sD^alpha f = 0.
        for &(sigma, rho, alpha, a) in &[(1.0, 2.0, 0.5, 0.0), (0.4, 0.7, 0.3, 0.5)] {
            let p = params(sigma, rho, alpha, a);
            let spec = PowerExpSpec::new(alpha - 1.0, p).unwrap();
            let limit = substantial_integral_power(&spec, 1.0 - alpha, a).unwrap();
            assert!((limit - gamma(alpha).unwrap() * (-sigma * p.u_a()).exp()).abs() < 1e-14);
            for &t in &[a + 0.1, a + 0.5, a + 1.0] {
                let corr = rl_inversion_correction(&p, limit, t).unwrap();
                let f = spec.eval(t).unwrap();
                assert!((corr - f).abs() < 1e-13 * f.abs(), "{corr} vs {f}");
            }
        }
    }
}
