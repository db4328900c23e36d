use thiserror::Error;

/// Every domain error the library can report. `name()` is the stable
/// machine-readable identifier surfaced by the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("outside closed family: {0}")]
    OutsideClosedFamily(String),
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("operator is not diagonal: {0}")]
    NotDiagonal(String),
    #[error("no generator-polynomial match: {0}")]
    NoMatch(String),
    #[error("Hamiltonian vector field does not preserve the holomorphic polarization: {0}")]
    PolarizationViolated(String),
    #[error("scalar part retains zbar dependence: {0}")]
    NotClosedForm(String),
    #[error("differential form has order {0} > 1")]
    NotFirstOrder(usize),
    #[error("holomorphic integration constant is not z-only: {0}")]
    InconsistentScalarPart(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no solution within the polynomial ansatz: {0}")]
    NoSolution(String),
    #[error("divergent spectral sum: {0}")]
    DivergentSum(String),
    #[error("missing spectral rule: {0}")]
    MissingRule(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("slice factor is not contractive on the truncated space: {0}")]
    UnstableSlice(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::OutsideClosedFamily(_) => "OutsideClosedFamily",
            Error::TruncationTooSmall(_) => "TruncationTooSmall",
            Error::NotDiagonal(_) => "NotDiagonal",
            Error::NoMatch(_) => "NoMatch",
            Error::PolarizationViolated(_) => "PolarizationViolated",
            Error::NotClosedForm(_) => "NotClosedForm",
            Error::NotFirstOrder(_) => "NotFirstOrder",
            Error::InconsistentScalarPart(_) => "InconsistentScalarPart",
            Error::Unsupported(_) => "Unsupported",
            Error::NoSolution(_) => "NoSolution",
            Error::DivergentSum(_) => "DivergentSum",
            Error::MissingRule(_) => "MissingRule",
            Error::QuadratureNotConverged(_) => "QuadratureNotConverged",
            Error::UnstableSlice(_) => "UnstableSlice",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// The offending subexpression or detail carried by the error.
    pub fn detail(&self) -> String {
        match self {
            Error::NotFirstOrder(n) => format!("order {}", n),
            Error::OutsideClosedFamily(s)
            | Error::TruncationTooSmall(s)
            | Error::NotDiagonal(s)
            | Error::NoMatch(s)
            | Error::PolarizationViolated(s)
            | Error::NotClosedForm(s)
            | Error::InconsistentScalarPart(s)
            | Error::Unsupported(s)
            | Error::NoSolution(s)
            | Error::DivergentSum(s)
            | Error::MissingRule(s)
            | Error::QuadratureNotConverged(s)
            | Error::UnstableSlice(s)
            | Error::InvalidInput(s) => s.clone(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
