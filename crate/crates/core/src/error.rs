use thiserror::Error;

/// Everything that can go wrong while building states, measuring or optimising.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("state is not normalised (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("matrix has eigenvalue {0:e} below the PSD slack")]
    NotPositive(f64),

    #[error("cannot combine a pure state with a mixed state; lift explicitly")]
    KindMismatch,

    #[error("invalid party set: {0}")]
    InvalidParties(String),

    #[error("expected a {expected}-party state, got {got}")]
    WrongPartyCount { expected: usize, got: usize },

    #[error("operation needs a {0} state")]
    WrongKind(&'static str),

    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("outcome {k} in round {round} has zero probability")]
    NullOutcome { round: usize, k: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("seed family {0} has no closed-form round-one block for this scheme")]
    UnsupportedFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
