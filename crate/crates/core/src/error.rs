use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidParameter(String),
    DegenerateScale { index: u64 },
    ScaleMismatch,
    AmbiguousDominance,
    PreconditionFailed(String),
    NotModerate(String),
    NotCauchy { mu: usize, detail: String },
    Unsupported(String),
    NotInvertible,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::DegenerateScale { index } => {
                write!(f, "degenerate scale: a_m(n) = 1 at n = {index}")
            }
            Error::ScaleMismatch => f.write_str("operands live on different scales"),
            Error::AmbiguousDominance => {
                f.write_str("sum may cancel exactly; dominant term is ambiguous")
            }
            Error::PreconditionFailed(m) => write!(f, "precondition failed: {m}"),
            Error::NotModerate(m) => write!(f, "not moderate: {m}"),
            Error::NotCauchy { mu, detail } => {
                write!(f, "family is not Cauchy at level {mu}: {detail}")
            }
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::NotInvertible => f.write_str("representative is not invertible"),
        }
    }
}

impl core::error::Error for Error {}
