use thiserror::Error;

/// Errors raised by state validation and the entanglement-density pipeline.
///
/// Validation variants carry the measured residual so callers can report
/// how far an input is from satisfying the violated invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |M - M^dagger| = {residual:.3e} (tolerance {tolerance:.0e})")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("trace is not one: |tr(M) - 1| = {residual:.3e} (tolerance {tolerance:.0e})")]
    TraceNotOne { residual: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e} (tolerance -{tolerance:.0e})")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("state is not normalized: |norm - 1| = {residual:.3e}")]
    NotNormalized { residual: f64 },

    #[error("invalid rank {0}: expected 1, 2, 3 or 4")]
    InvalidRank(usize),

    #[error("basis is not orthonormal: residual {residual:.3e}")]
    NotOrthonormal { residual: f64 },

    #[error("state is not in the subspace: residual norm {residual:.3e}")]
    NotInSubspace { residual: f64 },

    #[error("complement basis formula is degenerate (y^2 + z^2 = {norm_sq:.3e})")]
    DegenerateComplement { norm_sq: f64 },

    #[error("subspace contains only separable states (E_max = {e_max:.3e})")]
    DegenerateSubspace { e_max: f64 },

    #[error("dual state is maximally entangled (E_perp = {e_perp}); the closed form diverges")]
    DivergentDual { e_perp: f64 },

    #[error("state has vanishing largest eigenvalue ({lambda1:.3e})")]
    ZeroState { lambda1: f64 },

    #[error("histogram too coarse for feature detection: {expected_per_bin:.1} expected counts per bin (need >= 100)")]
    InsufficientResolution { expected_per_bin: f64 },

    #[error("infeasible markers: {field}: {reason}")]
    InfeasibleMarkers { field: &'static str, reason: String },

    #[error("missing angles for {0}")]
    MissingAngles(&'static str),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
