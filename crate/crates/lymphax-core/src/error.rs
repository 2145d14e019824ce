use thiserror::Error;

/// Violation of a construction invariant on model parameters.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter `{name}`: {reason} (got {value})")]
pub struct ParamError {
    pub name: &'static str,
    pub reason: &'static str,
    pub value: f64,
}

impl ParamError {
    pub fn new(name: &'static str, reason: &'static str, value: f64) -> Self {
        Self { name, reason, value }
    }
}

/// Runtime failure of a numerical routine or of a simulation step.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("domain error in {op}: {what} = {value}")]
    Domain {
        op: &'static str,
        what: &'static str,
        value: f64,
    },
    /// Root finding or Newton iteration failed to converge.
    #[error("{op} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        op: &'static str,
        iterations: u32,
        residual: f64,
    },
    /// Requested value lies outside the range representable by the model.
    #[error("{op}: requested value {value} is out of range")]
    OutOfRange { op: &'static str, value: f64 },
    /// Cross-sectional area lost positivity during a finite-volume update.
    #[error("positivity loss in lymphangion {vessel}, cell {cell}, at t = {time} s (A = {area:e})")]
    PositivityLoss {
        vessel: usize,
        cell: usize,
        time: f64,
        area: f64,
    },
    /// Implicit ODE stage iteration failed even after internal step halving.
    #[error("implicit ODE solve failed at t = {time} s ({context})")]
    OdeFailure { context: &'static str, time: f64 },
    /// The collector is mis-assembled (e.g. a side without neighbour or program).
    #[error("configuration error: {0}")]
    Config(&'static str),
    /// Invalid model parameters surfaced during assembly.
    #[error(transparent)]
    Param(#[from] ParamError),
}
