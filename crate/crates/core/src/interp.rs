//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).
//!
//! Used to move tabulated samples onto a u-uniform [`Grid`]. Interpolation
//! happens in `u = t^rho`, the variable the operators are built on.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{to_u, Grid, GridFunction};

#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

fn endpoint_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidData(format!(
                "interpolation needs at least 2 matching points, got {} x and {} y",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData(
                "interpolation data must be finite".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidData(
                "abscissae must be strictly increasing".into(),
            ));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let m: Vec<f64> = y
            .windows(2)
            .zip(&h)
            .map(|(w, h)| (w[1] - w[0]) / h)
            .collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = m[0];
            d[1] = m[0];
        } else {
            for k in 1..n - 1 {
                if m[k - 1] * m[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
                }
            }
            d[0] = endpoint_slope(h[0], h[1], m[0], m[1]);
            d[n - 1] = endpoint_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    /// Value at `xq`; errors outside the data range.
    pub fn eval(&self, xq: f64) -> Result<f64> {
        let (lo, hi) = (self.x[0], self.x[self.x.len() - 1]);
        let slack = 1e-12 * (hi - lo);
        if !(xq >= lo - slack && xq <= hi + slack) {
            return Err(Error::Domain(format!(
                "{xq} lies outside the tabulated range [{lo}, {hi}]"
            )));
        }
        let xq = xq.clamp(lo, hi);
        let k = match self.x.partition_point(|&v| v <= xq) {
            0 => 0,
            i => (i - 1).min(self.x.len() - 2),
        };
        let h = self.x[k + 1] - self.x[k];
        let s = (xq - self.x[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        Ok((2.0 * s3 - 3.0 * s2 + 1.0) * self.y[k]
            + (s3 - 2.0 * s2 + s) * h * self.d[k]
            + (-2.0 * s3 + 3.0 * s2) * self.y[k + 1]
            + (s3 - s2) * h * self.d[k + 1])
    }
}

/// Resamples `(t, value)` pairs onto `grid`, interpolating in `u = t^rho`.
pub fn resample(t: &[f64], values: &[f64], grid: Arc<Grid>) -> Result<GridFunction> {
    let u = t
        .iter()
        .map(|&ti| to_u(ti, grid.rho()))
        .collect::<Result<Vec<_>>>()?;
    let p = Pchip::new(u, values.to_vec())?;
    let out = grid
        .u()
        .iter()
        .map(|&uq| p.eval(uq))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::new(grid, out)
}
