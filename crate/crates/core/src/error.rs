use alloc::string::String;
use core::fmt;

/// Errors raised by grid construction and the estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidGrid(&'static str),
    NonFiniteSample(usize),
    LengthMismatch { expected: usize, found: usize },
    DimensionMismatch { expected: usize, found: usize },
    MeasureMismatch { expected: crate::Measure, found: crate::Measure },
    InvalidExponent(f64),
    InvalidParameter { name: &'static str, value: f64 },
    ShiftTooLarge { norm: f64, cap: f64 },
    NonPositiveTime(f64),
    VanishingDivergence(f64),
    UnknownCorpus(String),
    NonzeroMean(f64),
    Unsupported(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::NonFiniteSample(i) => write!(f, "non-finite sample at flat index {i}"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} samples, found {found}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected dimension {expected}, found {found}")
            }
            Error::MeasureMismatch { expected, found } => {
                write!(f, "expected {expected:?} measure, found {found:?}")
            }
            Error::InvalidExponent(p) => write!(f, "exponent {p} is outside [1, inf]"),
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::ShiftTooLarge { norm, cap } => {
                write!(f, "shift of length {norm} exceeds the grid cap {cap}")
            }
            Error::NonPositiveTime(t) => write!(f, "semigroup time must be positive, got {t}"),
            Error::VanishingDivergence(d) => {
                write!(f, "divergence norm {d:e} is too small for a quotient")
            }
            Error::UnknownCorpus(name) => write!(f, "unknown corpus function `{name}`"),
            Error::NonzeroMean(m) => write!(f, "function must have zero mean, mean is {m:e}"),
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
        }
    }
}

impl core::error::Error for Error {}
