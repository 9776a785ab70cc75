//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// A Fock index does not fit in the truncated basis.
    #[error("fock index {index} outside truncated basis of dimension {dim}")]
    IndexOutsideBasis { index: usize, dim: usize },

    /// A state's weight beyond the truncation edge exceeds the tail gate.
    #[error(
        "truncated tail weight {tail:.3e} exceeds tolerance {tol:.3e}; \
         a dimension of at least {required_dim} is needed"
    )]
    TailTooHeavy {
        tail: f64,
        tol: f64,
        required_dim: usize,
    },

    /// A matrix or vector failed a structural invariant.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A phase-space point lies outside the region where the truncated
    /// coherent overlap is trustworthy.
    #[error(
        "|alpha|^2 = {alpha_sq:.3} outside the convergence region \
         (max {max_alpha_sq:.3}) for dimension {dim}"
    )]
    OutsideConvergence {
        alpha_sq: f64,
        max_alpha_sq: f64,
        dim: usize,
    },

    /// A grid does not span the support a computation needs.
    #[error("grid too narrow: half-width {half_width:.3} < required {required:.3}")]
    GridTooNarrow { half_width: f64, required: f64 },

    /// Probability mass captured by a grid fell short of one.
    #[error("grid captured mass {mass:.8} (deficit {deficit:.3e} exceeds {tol:.1e})")]
    CoverageDeficit { mass: f64, deficit: f64, tol: f64 },

    /// Two grids that must match do not.
    #[error("incompatible grids: {0}")]
    GridMismatch(String),

    /// The spectral cutoff cannot contain the field's spectrum.
    #[error(
        "spectral cutoff insufficient: relative residual {residual:.3e} at \
         cutoff radius {radius:.3} exceeds {tol:.1e}"
    )]
    CutoffInsufficient {
        residual: f64,
        radius: f64,
        tol: f64,
    },

    /// A classical joint model is not well posed.
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
