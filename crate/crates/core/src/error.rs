use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A state, loss or parameter left the finite range.
    NonFinite(&'static str),
    DimensionMismatch { expected: usize, got: usize },
    /// The operation needs the other policy architecture.
    KindMismatch { expected: &'static str, got: &'static str },
    EmptyDataset,
    /// A value violates the invariants of its owning type.
    InvalidParameter { field: &'static str, reason: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::KindMismatch { expected, got } => {
                write!(f, "policy kind mismatch: expected {expected}, got {got}")
            }
            Error::EmptyDataset => f.write_str("empty dataset"),
            Error::InvalidParameter { field, reason } => write!(f, "invalid {field}: {reason}"),
        }
    }
}

pub(crate) fn invalid(field: &'static str, reason: &'static str) -> Error {
    Error::InvalidParameter { field, reason }
}

impl core::error::Error for Error {}
