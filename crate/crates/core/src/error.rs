use thiserror::Error;

/// Errors raised by every levlab operation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Gamma pole at non-positive integer {0}")]
    Pole(f64),
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("order {0} too close to a non-zero integer for the Y/H/K combination")]
    NearIntegerOrder(String),
    #[error("invalid parameters: {0}")]
    Validation(String),
    #[error("symbol evaluated on its singular set at x = {0}")]
    SingularPoint(f64),
    #[error("spectral singularity at k = {0}")]
    SpectralSingularity(f64),
    #[error("Re(m) = 0 symbols live in the periodic algebra, not on the square")]
    WrongAlgebra,
    #[error("exceptional pair, not Fredholm: {0}")]
    NotFredholm(String),
    #[error("divergent trace: {0}")]
    DivergentTrace(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("wave operator is unbounded: {0}")]
    UnboundedOperator(String),
}

impl Error {
    /// True for the refusals that mirror an undefined mathematical object
    /// (as opposed to bad input or an implementation failure).
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::NotFredholm(_)
                | Error::UnboundedOperator(_)
                | Error::SingularPoint(_)
                | Error::SpectralSingularity(_)
                | Error::WrongAlgebra
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
