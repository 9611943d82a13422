use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// Dense 2^N operators are only built up to a configurable atom count.
    #[error("{atoms} atoms exceed the dense-operator limit of {max}")]
    ResourceLimit { atoms: u64, max: u64 },

    #[error("Floquet truncation residual {residual:e} exceeds tolerance {tolerance:e}; increase q_max (currently {q_max})")]
    Truncation {
        residual: f64,
        tolerance: f64,
        q_max: u32,
    },

    #[error("{value} lies outside the tabulated range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("no bath channel carries a nonzero rate")]
    NoCoupling,

    #[error("saturation boost diverges at x_eff = {x_eff} (asymptote 2/x)")]
    Divergent { x_eff: f64 },

    #[error("steady state not reached after {steps} steps (residual {residual:e})")]
    ConvergenceFailure { steps: usize, residual: f64 },

    #[error("integration lost positivity: minimum eigenvalue {min_eigenvalue:e} at t = {time}")]
    IntegrationInstability { min_eigenvalue: f64, time: f64 },

    #[error("generator nullspace is {dimension}-dimensional; the steady state depends on the initial state")]
    DegenerateNullspace { dimension: usize },

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of an iterative solver, as opposed to bad input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure { .. }
                | Error::IntegrationInstability { .. }
                | Error::DegenerateNullspace { .. }
        )
    }
}
