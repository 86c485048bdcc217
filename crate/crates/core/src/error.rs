use thiserror::Error;

/// Errors produced by the stability analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "monodromy integration did not meet tolerance after {steps} steps \
         (error estimate {error_estimate:e}, symplectic residual {residual:e})"
    )]
    ToleranceNotMet {
        steps: usize,
        error_estimate: f64,
        residual: f64,
    },

    #[error("degeneracy scalar has imaginary residue {imaginary:e}; input is not symplectic")]
    NonRealResult { imaginary: f64 },

    #[error(
        "Galerkin index did not stabilise up to truncation {max_truncation} \
         at mu = {mu}, e = {e}, omega angle = {omega_angle}"
    )]
    TruncationNotConverged {
        max_truncation: usize,
        mu: f64,
        e: f64,
        omega_angle: f64,
    },

    #[error("Hermitian eigensolver did not converge (dimension {dimension})")]
    EigenSolverFailed { dimension: usize },

    #[error(
        "index jumps at e = {e}, omega angle = {omega_angle} sum to {total} \
         (expected 2, or 0 at omega = 1)"
    )]
    TotalMultiplicityViolation {
        e: f64,
        omega_angle: f64,
        total: i64,
    },

    #[error("no hyperbolic/non-hyperbolic transition found at e = {e}")]
    NoTransitionFound { e: f64 },

    #[error("tangent fit needs at least {required} samples in the window, found {found}")]
    InsufficientSamples { found: usize, required: usize },

    #[error("at e = {e}: {source}")]
    AtEccentricity { e: f64, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
