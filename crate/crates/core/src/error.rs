//! The error type shared by every module.

use std::fmt;

/// Everything that can go wrong while building or running a computation.
///
/// `BudgetExceeded` is the one variant that does not indicate a malformed
/// input: it reports that a closure would grow past its configured cap, so
/// the caller can either raise the budget or treat the question as open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An operation was applied to the wrong number of arguments, or a
    /// composition mixed arities.
    ArityMismatch { expected: usize, found: usize },
    /// Tables or relations over different universes were combined.
    UniverseMismatch,
    /// Evaluation left the finite window; carries the offending argument
    /// tuple as a certificate.
    ValueEscapesWindow { args: Vec<u8> },
    /// A construction needs an element beyond the edge of the window.
    WindowTooSmall { required: i64, max: u8 },
    /// A closure grew past its budget.
    BudgetExceeded { budget: usize },
    /// Malformed input: bad universe size, projection index out of range,
    /// wrong table length, inconsistent partial-operation domain, ...
    Invalid(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ArityMismatch { expected, found } => {
                write!(f, "arity mismatch: expected {expected}, found {found}")
            }
            Error::UniverseMismatch => write!(f, "universe mismatch"),
            Error::ValueEscapesWindow { args } => {
                write!(f, "value escapes the window at arguments {args:?}")
            }
            Error::WindowTooSmall { required, max } => {
                write!(
                    f,
                    "window too small: construction needs {required}, window ends at {max}"
                )
            }
            Error::BudgetExceeded { budget } => {
                write!(f, "closure exceeded its budget of {budget}")
            }
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
