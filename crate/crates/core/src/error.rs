use alloc::string::String;
use core::fmt;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The universe must contain at least one element.
    EmptyUniverse,
    /// An element is not below the universe size.
    OutOfRange { element: u32, size: u32 },
    /// Tuple lengths or relation arities do not fit together.
    Arity { expected: usize, found: usize },
    /// Two values live on different universes.
    UniverseMismatch { left: u32, right: u32 },
    /// A value does not have the claimed shape (not an equivalence relation,
    /// not one-to-one, ...).
    InvalidStructure(String),
    /// The input is outside the range where the requested construction is
    /// defined. The message names the violated threshold.
    Precondition(String),
    /// A search or enumeration would exceed the configured budget.
    BudgetExceeded { what: &'static str, estimate: u128, limit: u128 },
    /// Syntax error in formula or family text, `pos` is a byte offset.
    Parse { pos: usize, message: String },
    /// A formula mentions a variable, relation or family with no binding.
    Unbound(String),
    /// A construction failed its own postcondition check. This is a bug.
    Construction(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyUniverse => f.write_str("universe must have at least one element"),
            Error::OutOfRange { element, size } => {
                write!(f, "element {element} is outside a universe of size {size}")
            }
            Error::Arity { expected, found } => {
                write!(f, "arity mismatch: expected {expected}, found {found}")
            }
            Error::UniverseMismatch { left, right } => {
                write!(f, "universe mismatch: {left} vs {right}")
            }
            Error::InvalidStructure(msg) => write!(f, "invalid structure: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::BudgetExceeded { what, estimate, limit } => {
                write!(f, "budget exceeded for {what}: estimated {estimate} > limit {limit}")
            }
            Error::Parse { pos, message } => write!(f, "syntax error at byte {pos}: {message}"),
            Error::Unbound(name) => write!(f, "unbound name `{name}`"),
            Error::Construction(msg) => write!(f, "construction failed its own check: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
