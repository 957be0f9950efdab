use std::fmt;

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// A checked property failed (exit 1). Outputs are still written.
    Assertion(Vec<String>),
    /// Output could not be written (exit 1).
    Io(String),
    /// Bad flags or flag values (exit 2).
    Usage(String),
    /// Malformed input data (exit 3).
    Format(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Assertion(_) | Self::Io(_) => 1,
            Self::Usage(_) => 2,
            Self::Format(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Assertion(v) => write!(f, "assertion failed: {}", v.join("; ")),
            Self::Io(s) | Self::Usage(s) | Self::Format(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fracext::Error> for CliError {
    fn from(e: fracext::Error) -> Self {
        use fracext::Error as E;
        match e {
            E::Format(_) | E::DimensionMismatch { .. } | E::Io(_) => Self::Format(e.to_string()),
            other => Self::Usage(other.to_string()),
        }
    }
}
