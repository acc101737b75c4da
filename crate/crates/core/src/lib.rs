//! Generalized substantial fractional calculus.
//!
//! Operators are parameterized by a tempering rate `sigma`, a power
//! exponent `rho > 0`, an order `alpha > 0` and a lower limit `a >= 0`:
//!
//! ```text
//! sI^{alpha,rho}_a f(t) = rho^{...} / Gamma(alpha) int_a^t e^{-sigma (t^rho - s^rho)}
//!                          (t^rho - s^rho)^{alpha-1} f(s) d(s^rho)
//! ```
//!
//! Everything is computed in `u = t^rho`, where the operators reduce to
//! classical Riemann-Liouville ones after multiplying by `e^{sigma u}`.
//!
//! * [`special`]: Gamma and one-parameter Mittag-Leffler functions
//! * [`grid`]: parameters, u-uniform grids, sampled functions
//! * [`operators`]: integrals, derivatives, reconstruction identities
//! * [`volterra`]: Caputo-type initial value problems
//! * [`analysis`]: Gronwall bounds and continuous-dependence experiments
//! * [`check`]: the invariant suite behind `subfrac check`
//! * [`interp`]: monotone cubic resampling of tabulated data
//! * [`cli`]: the `subfrac` command-line front end

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod check;
pub mod cli;
pub mod error;
pub mod grid;
pub mod interp;
pub mod operators;
pub mod special;
pub mod volterra;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction, OperatorParams, PowerExpSpec, Sign};
pub use operators::{InitialData, QuadratureConfig, Scheme};
pub use special::MlSeriesConfig;
