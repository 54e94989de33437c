//! Error taxonomy shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoolError>;

/// Everything that can go wrong when building models or running solvers.
#[derive(Debug, Error)]
pub enum CoolError {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested model variant does not exist for these parameters.
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// The Liouvillian null space has dimension > 1 at tolerance; the steady
    /// state is not unique and averaging would hide physics.
    #[error("multiple steady states: null-space dimension {null_dim} at tolerance {tol:e}")]
    MultipleSteadyStates { null_dim: usize, tol: f64 },

    /// A linear or eigenvalue solver failed or did not reach the required
    /// residual.
    #[error("solver failure: {msg} (residual {residual:e})")]
    SolverFailure { msg: String, residual: f64 },

    /// Adaptive step size underflowed; the problem is too stiff for the
    /// explicit integrator.
    #[error("stiffness failure at t = {t} µs: step size {h:e} underflowed; \
             consider a smaller gamma_b/omega_m separation or an implicit fallback")]
    StiffnessFailure { t: f64, h: f64 },

    /// Trace drifted beyond the allowed bound during integration.
    #[error("integration failure: trace drift {drift:e} exceeds bound {bound:e}")]
    IntegrationFailure { drift: f64, bound: f64 },

    /// Data fed to a fit or reduction was unusable.
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Integer result does not fit the supported width.
    #[error("range error: {0}")]
    RangeError(String),

    /// A rate is undefined for the supplied distribution.
    #[error("undefined rate: {0}")]
    UndefinedRate(String),

    /// A mode file failed to parse.
    #[error("format error at line {line}: {msg}")]
    FormatError { line: usize, msg: String },

    /// A mode spectrum violated an invariant.
    #[error("validation error: invariant `{invariant}` violated by {magnitude:e}")]
    ValidationError { invariant: String, magnitude: f64 },

    /// Profiles were requested from a spectrum loaded with `profiles: none`.
    #[error("missing profiles: {0}")]
    MissingProfiles(String),

    /// Filesystem trouble while reading or writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CoolError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CoolError::InvalidArgument(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        CoolError::UnsupportedConfiguration(msg.into())
    }
}
