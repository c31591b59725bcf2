use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tangent vanishes at the boundary point (|phi'| = {0:.3e})")]
    DegenerateTangent(f64),
    #[error("near-degenerate denominator: min |phi(t)-phi(w)|/|t-w| = {0:.3e} < 1/4")]
    NearDegenerateDenominator(f64),
    #[error("bi-Lipschitz ratio {0:.3e} outside [1/4, 4]")]
    BiLipschitzLoss(f64),
    #[error("patches too close: interaction margin {0:.3e}")]
    InteractionProximity(f64),
    #[error("velocity constraint is degenerate (slope {0:.3e})")]
    DegenerateConstraint(f64),
    #[error("Newton did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("iterate left the unit ball (norm {0:.3e})")]
    BallExit(f64),
    #[error("Jacobian is singular or ill-conditioned")]
    DegenerateJacobian,
    #[error("Jacobian has non-finite entries")]
    NonFiniteJacobian,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("branches do not pair up: {0}")]
    GridMismatch(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("file format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
