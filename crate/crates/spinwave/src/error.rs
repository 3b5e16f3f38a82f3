use crate::model::ModeId;
use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter violates a domain invariant (non-finite, negative rate, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `|k1^2 - k2^2|` (or `|k1^2 + k3^2 - k2^2|`) is below the nondegeneracy
    /// guard. The resonant case needs a different treatment and is out of
    /// scope, so it is rejected rather than approximated.
    #[error(
        "degenerate couplings: |gap| = {gap:.3e} <= {threshold:.3e} \
         (k2^2 too close to k1^2{tri}; this resonant case is deferred and rejected)"
    )]
    DegenerateCouplings {
        gap: f64,
        threshold: f64,
        /// `" + k3^2"` for tripartite parameter sets, `""` otherwise.
        tri: &'static str,
    },

    /// Physical coupling conversion with a zero detuning.
    #[error("detuning must be nonzero")]
    ZeroDetuning,

    /// The oscillation period is only defined when beta is real.
    #[error(
        "oscillation period undefined: beta is imaginary (c^2 - gap = {discriminant:.6e} < 0)"
    )]
    ComplexBeta { discriminant: f64 },

    /// A tripartite-only operation was called with bipartite parameters.
    #[error("operation requires tripartite parameters (k3 present)")]
    TripartiteRequired,

    /// A bipartite-only operation was called with tripartite parameters.
    #[error("operation requires bipartite parameters (no k3)")]
    BipartiteRequired,

    /// Mode counts or vector lengths do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A photon-number quantity was requested for the spin mode.
    #[error("mode {0} is not photonic")]
    NotPhotonic(ModeId),

    /// Atom count outside the supported range of an operation.
    #[error("atom count {got} outside supported range {min}..={max}")]
    AtomCountOutOfRange { got: u64, min: u64, max: u64 },

    /// Truncated Fock evolution leaked population into the last retained
    /// level of some mode; results would be biased.
    #[error(
        "truncation overflow on mode {mode}: edge population {population:.3e} \
         exceeds {threshold:.1e}; increase that mode's dimension"
    )]
    TruncationOverflow {
        mode: ModeId,
        population: f64,
        threshold: f64,
    },

    /// The fixed-step integrator failed to keep the state norm constant.
    #[error("integrator norm drift {drift:.3e} exceeds tolerance {tolerance:.1e}")]
    NormDrift { drift: f64, tolerance: f64 },

    /// A Fock state failed validation.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// An operation was called outside its supported domain.
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
