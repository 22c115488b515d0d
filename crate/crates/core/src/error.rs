use thiserror::Error;

/// Errors raised while building or evaluating map families.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("price ratio must be finite and positive, got {0}")]
    InvalidRatio(f64),
    #[error("buyer fraction must lie in [0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("g argument must lie in [-1, 1], got {0}")]
    InvalidDifference(f64),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("f is not differentiable at rho = 1: {0}")]
    NonSmooth(String),
    #[error("C_N is undefined here: {0}")]
    OutOfDomain(String),
}

/// Errors raised by the dynamics layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("price {index} became {value} at step {step}")]
    NonFinitePrice { index: usize, value: f64, step: u64 },
    #[error("fraction {index} left [0, 1] by {excess:e} at step {step}")]
    FractionOutOfRange { index: usize, excess: f64, step: u64 },
    #[error("no preimage: {0}")]
    Inversion(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Errors raised by audits and derived constants.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuditError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("T_N did not terminate within {0} iterations")]
    NoCrossing(u64),
    #[error("contraction constant {0} is not below 1")]
    NotContracting(f64),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Errors raised by the periodic-orbit finder.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodicError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no orbit found: {reason} (best residual {residual:e} after {iterations} iterations)")]
    NotFound {
        reason: String,
        residual: f64,
        iterations: usize,
    },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Errors raised by the stability analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("point outside the smooth region: {0}")]
    Domain(String),
    #[error("step size {0} outside [1e-8, 1e-3]")]
    StepSize(f64),
    #[error("non-finite value while differentiating: {0}")]
    NonFinite(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
