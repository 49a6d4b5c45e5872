use std::fmt;

use prodmeasure_core::{Error as CoreError, ErrorKind};
use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Parse(String),
    Io(String),
    /// An invariant suite reported failures.
    Check(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.kind() == ErrorKind::Inconclusive => 3,
            CliError::Core(_) => 2,
            CliError::Parse(_) => 4,
            CliError::Io(_) | CliError::Check(_) => 1,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::DomainMismatch => "domain-mismatch",
                ErrorKind::Precondition => "precondition",
                ErrorKind::Unsupported => "unsupported",
                ErrorKind::IncompatibleTails => "incompatible-tails",
                ErrorKind::Overlap => "overlap",
                ErrorKind::NotACover => "not-a-cover",
                ErrorKind::Inconclusive => "inconclusive",
            },
            CliError::Parse(_) => "parse",
            CliError::Io(_) => "io",
            CliError::Check(_) => "check-failed",
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind_name(), "message": self.to_string()}})
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Parse(m) | CliError::Io(m) | CliError::Check(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}
