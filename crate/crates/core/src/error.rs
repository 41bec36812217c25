//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Two values that must share a wave grid were built on different grids.
    #[error("operands live on different wave grids")]
    GridMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("mode function is not normalized (self-contraction = {norm})")]
    NotNormalized { norm: f64 },
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("domain error: {0}")]
    Domain(String),
    /// The translation kernel degenerates at z = 0; callers must take the
    /// identity path instead of building the operator functional.
    #[error("translation distance z = 0 degenerates the operator functional")]
    DegenerateTranslation,
    #[error("grid node k = {k} lies within {dist:.3e} of a translation-kernel pole")]
    PoleProximity { k: f64, dist: f64 },
    #[error("insufficient grid support: endpoint/peak ratio {ratio:.3e} exceeds {tol:.0e}")]
    InsufficientGridSupport { ratio: f64, tol: f64 },
    /// The combined quadratic form of a star-product integral does not decay.
    #[error("star product integral is ill posed (decay-form margin {margin:.3e})")]
    IllPosedStar { margin: f64 },
    #[error("characteristic functional is not a normalized state (chi[0] = {chi0})")]
    UnnormalizedState { chi0: f64 },
    /// Moment extraction drops the half-identity of every term against the
    /// zero-point constant; a term without that structure cannot be used.
    #[error("term violates the half-identity zero-point convention (deviation {dev:.3e})")]
    ZeroPointConvention { dev: f64 },
    #[error("oracle truncation insufficient: tail mass {tail:.3e}")]
    OracleTruncation { tail: f64 },
    #[error("minimizers disagree: closed form z* = {z_closed}, golden section z* = {z_golden}")]
    MinimizerDisagreement { z_closed: f64, z_golden: f64 },
    #[error("scaling fit needs at least 3 points, got {got}")]
    FitInsufficientPoints { got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
