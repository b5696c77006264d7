use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("enumeration budget of {budget} nodes exhausted")]
    BudgetExceeded { budget: u64 },

    #[error("H_{{{ell},{r}}}({n}) is empty (requires n >= C({r},{ell}))")]
    EmptyRegion { ell: u32, r: u32, n: u64 },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for overflow and budget failures, the "computation" class of errors.
    pub fn is_computational(&self) -> bool {
        matches!(self, Error::Overflow(_) | Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
