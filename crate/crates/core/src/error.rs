use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),

    #[error("point ({re}, {im}) lies outside the {domain} domain")]
    DomainViolation {
        re: f64,
        im: f64,
        domain: &'static str,
    },

    #[error("non-finite integrand value at node ({re}, {im})")]
    IntegrationFailure { re: f64, im: f64 },

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("matrix is not positive definite (eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("quadratic program is infeasible")]
    Infeasible,

    #[error(
        "no convergence after {iterations} iterations \
         (stationarity {stationarity:e}, feasibility {feasibility:e}, complementarity {complementarity:e})"
    )]
    NoConvergence {
        iterations: usize,
        stationarity: f64,
        feasibility: f64,
        complementarity: f64,
    },

    #[error("brute-force oracle supports at most 16 constraints, got {0}")]
    OracleTooLarge(usize),

    #[error("hard margin is infeasible: largest slack {0:e}")]
    MarginInfeasible(f64),

    #[error("grid resolution insufficient: relative residual {0:e}")]
    ResolutionInsufficient(f64),

    #[error("Neumann boundary condition violated: normal derivative {0:e}")]
    BoundaryConditionViolated(f64),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
