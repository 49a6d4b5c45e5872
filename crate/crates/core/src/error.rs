use alloc::string::String;
use core::fmt;

/// Broad classes of failure; front ends map these onto exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// A set does not belong to the factor it was used with.
    DomainMismatch,
    /// An input violates a documented precondition.
    Precondition,
    /// The operation is not defined for this kind of factor.
    Unsupported,
    /// Two tail rules cannot be combined exactly.
    IncompatibleTails,
    /// Sets that were required to be disjoint overlap.
    Overlap,
    /// A cover prefix misses part of its target.
    NotACover,
    /// Convergence could not be certified.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Error {
    kind: ErrorKind,
    message: String,
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Error { kind, message: message.into() }
    }

    pub fn kind(&self) -> ErrorKind {
        self.kind
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::DomainMismatch, message)
    }

    pub(crate) fn precondition(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Precondition, message)
    }

    pub(crate) fn unsupported(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Unsupported, message)
    }

    pub(crate) fn tails(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::IncompatibleTails, message)
    }

    pub(crate) fn overlap(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Overlap, message)
    }

    pub(crate) fn not_a_cover(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::NotACover, message)
    }

    pub(crate) fn inconclusive(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Inconclusive, message)
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ErrorKind::DomainMismatch => "domain mismatch",
            ErrorKind::Precondition => "precondition violated",
            ErrorKind::Unsupported => "unsupported operation",
            ErrorKind::IncompatibleTails => "incompatible tails",
            ErrorKind::Overlap => "overlapping sets",
            ErrorKind::NotACover => "not a cover",
            ErrorKind::Inconclusive => "inconclusive convergence",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

impl core::error::Error for Error {}
