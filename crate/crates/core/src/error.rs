use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{p} is not prime (divisible by {factor})")]
    NotPrime { p: u64, factor: u64 },

    #[error("modulus {p} outside the supported range 3 <= p < 2^62")]
    ModulusOutOfRange { p: u64 },

    #[error("{what} = {value} outside the admissible range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },

    #[error("no inverse: {m} is divisible by {p}")]
    NoInverse { m: u64, p: u64 },

    #[error("{what} = {value} does not divide {of}")]
    NotDivisor {
        what: &'static str,
        value: u64,
        of: u64,
    },

    #[error("{what} needs {requested} but the cap is {cap}; raise it with {flag}")]
    CapExceeded {
        what: &'static str,
        requested: u64,
        cap: u64,
        flag: &'static str,
    },

    #[error("work cap exceeded ({work} > {cap} operations); use sampled mode")]
    WorkCapExceeded { work: u64, cap: u64 },

    #[error("exponent fit needs at least two usable points with distinct p, got {usable}")]
    InsufficientPoints { usable: usize },

    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Whether the error is a refusal to run past a configured cap, as opposed
    /// to a mathematically invalid request.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::WorkCapExceeded { .. })
    }
}
