use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty support for mu(k={k}, n={n}, m={m}): need k <= m <= n and m - k <= n - m")]
    SupportEmpty { k: usize, n: usize, m: usize },

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: String,
        cap: u128,
    },

    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    #[error("constraint generation did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("{value} is not divisible by {divisor}")]
    Divisibility { value: usize, divisor: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("malformed protocol tree: {0}")]
    MalformedTree(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_cap(what: &'static str, size: u128, cap: u128) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded {
            what,
            size: size.to_string(),
            cap,
        })
    } else {
        Ok(())
    }
}
