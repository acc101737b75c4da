use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function has a pole at x = {0}")]
    Pole(f64),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too small: need at least {need} nodes, have {have}")]
    GridTooSmall { need: usize, have: usize },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("series did not converge after {terms} terms (last term {last_term:e})")]
    SeriesNonConvergence { terms: usize, last_term: f64 },

    #[error("right-hand side returned a non-finite value at t = {t}, y = {y}")]
    NonFiniteRhs { t: f64, y: f64 },

    #[error(
        "Picard iteration did not converge in {iterations} iterations (last ratio {last_ratio})"
    )]
    PicardNonConvergence { iterations: usize, last_ratio: f64 },

    #[error("corrector iteration diverged at node {node}")]
    CorrectorDivergence { node: usize },

    #[error("h_tilde = {h_tilde} violates h_tilde < {limit}")]
    InvalidHTilde { h_tilde: f64, limit: f64 },

    #[error("horizon {h} exceeds the guaranteed existence interval {h_max} (outside the guaranteed regime)")]
    OutsideExistence { h: f64, h_max: f64 },
}

impl Error {
    /// Failures of the numerics themselves, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_)
                | Error::SeriesNonConvergence { .. }
                | Error::NonFiniteRhs { .. }
                | Error::PicardNonConvergence { .. }
                | Error::CorrectorDivergence { .. }
        )
    }
}
