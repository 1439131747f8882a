use std::fmt;

use quantclass_core::Error;

/// Everything that stops a command, with its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    /// A syntax error in an input file, with its 1-based line.
    Parse { line: usize, message: String },
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::BudgetExceeded { .. }) => 3,
            CliError::Core(Error::Construction(_)) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Io(_) => "io",
            CliError::Core(e) => match e {
                Error::BudgetExceeded { .. } => "budget",
                Error::Precondition(_) => "precondition",
                Error::Construction(_) => "construction",
                Error::Parse { .. } => "parse",
                _ => "input",
            },
        }
    }

    /// Adds the file name to parse errors.
    pub fn in_file(self, path: &str) -> CliError {
        match self {
            CliError::Parse { line, message } => CliError::Parse { line, message: format!("{path}: {message}") },
            e => e,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Parse { line, message } => write!(f, "line {line}: {message}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// Turns a byte offset of a core parse error into a line number.
pub fn locate(text: &str, e: Error) -> CliError {
    match e {
        Error::Parse { pos, message } => {
            let line = text.as_bytes()[..pos.min(text.len())].iter().filter(|&&b| b == b'\n').count() + 1;
            CliError::Parse { line, message }
        }
        e => CliError::Core(e),
    }
}
