//! Product-integration weights for the Riemann-Liouville integral
//!
//! ```text
//! I^q g(u_i) = 1/Gamma(q) * int_{u_0}^{u_i} (u_i - v)^{q-1} g(v) dv
//! ```
//!
//! on a uniform grid with step `h`. The kernel is integrated exactly against
//! a piecewise-linear (trapezoid) or piecewise-constant (left rectangle)
//! interpolant of `g`. The weights only depend on `i - j`, except the
//! trapezoid weight of the first node.

use crate::error::{Error, Result};
use crate::special::gamma;

/// Interpolant used for the smooth factor under the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Piecewise-constant, left endpoint. First order.
    ProductRectangle,
    /// Piecewise-linear. Second order for smooth integrands.
    #[default]
    ProductTrapezoid,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product_rectangle" | "rectangle" => Ok(Scheme::ProductRectangle),
            "product_trapezoid" | "trapezoid" => Ok(Scheme::ProductTrapezoid),
            other => Err(Error::InvalidParams(format!(
                "unknown quadrature scheme `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ProductWeights {
    order: f64,
    /// `h^q / Gamma(q + 2)`
    trap_scale: f64,
    /// `h^q / Gamma(q + 1)`
    rect_scale: f64,
    /// `k^q`, k = 0..=n
    pow_q: Vec<f64>,
    /// `k^(q+1)`, k = 0..=n
    pow_q1: Vec<f64>,
    /// second differences of `k^(q+1)`, indexed by k = i - j >= 1
    interior: Vec<f64>,
}

impl ProductWeights {
    pub(crate) fn new(order: f64, n: usize, h: f64) -> Result<Self> {
        if !(order > 0.0) || !order.is_finite() {
            return Err(Error::InvalidParams(format!(
                "product integration needs a positive order, got {order}"
            )));
        }
        let pow_q: Vec<f64> = (0..=n).map(|k| (k as f64).powf(order)).collect();
        let pow_q1: Vec<f64> = (0..=n + 1).map(|k| (k as f64).powf(order + 1.0)).collect();
        let mut interior = vec![0.0; n + 1];
        for k in 1..=n {
            interior[k] = pow_q1[k + 1] - 2.0 * pow_q1[k] + pow_q1[k - 1];
        }
        let hq = h.powf(order);
        Ok(Self {
            order,
            trap_scale: hq / gamma(order + 2.0)?,
            rect_scale: hq / gamma(order + 1.0)?,
            pow_q,
            pow_q1,
            interior,
        })
    }

    pub(crate) fn trap_scale(&self) -> f64 {
        self.trap_scale
    }

    pub(crate) fn rect_scale(&self) -> f64 {
        self.rect_scale
    }

    /// Unscaled trapezoid weight of node `j` in the integral ending at node `i >= 1`.
    #[inline]
    pub(crate) fn trap(&self, i: usize, j: usize) -> f64 {
        if j == i {
            1.0
        } else if j == 0 {
            let n = i as f64;
            self.pow_q1[i - 1] - (n - 1.0 - self.order) * self.pow_q[i]
        } else {
            self.interior[i - j]
        }
    }

    /// Unscaled rectangle weight of node `j < i` in the integral ending at node `i`.
    #[inline]
    pub(crate) fn rect(&self, i: usize, j: usize) -> f64 {
        let k = i - j;
        self.pow_q[k] - self.pow_q[k - 1]
    }

    /// Trapezoid history sum `sum_{j < i} w_{ij} g_j` (unscaled).
    pub(crate) fn trap_history(&self, i: usize, g: &[f64]) -> f64 {
        let mut acc = self.trap(i, 0) * g[0];
        for (j, gj) in g.iter().enumerate().take(i).skip(1) {
            acc += self.interior[i - j] * gj;
        }
        acc
    }

    /// Rectangle sum `sum_{j < i} w_{ij} g_j` (unscaled).
    pub(crate) fn rect_history(&self, i: usize, g: &[f64]) -> f64 {
        g.iter()
            .enumerate()
            .take(i)
            .map(|(j, gj)| self.rect(i, j) * gj)
            .sum()
    }
}

/// Riemann-Liouville integral of order `order >= 0` of samples `g` at every node.
pub(crate) fn rl_integral(order: f64, g: &[f64], h: f64, scheme: Scheme) -> Result<Vec<f64>> {
    if order == 0.0 {
        return Ok(g.to_vec());
    }
    let n = g.len() - 1;
    let w = ProductWeights::new(order, n, h)?;
    let mut out = vec![0.0; n + 1];
    match scheme {
        Scheme::ProductTrapezoid => {
            for i in 1..=n {
                out[i] = w.trap_scale * (w.trap_history(i, g) + g[i]);
            }
        }
        Scheme::ProductRectangle => {
            for (i, o) in out.iter_mut().enumerate().skip(1) {
                *o = w.rect_scale * w.rect_history(i, g);
            }
        }
    }
    Ok(out)
}
