use std::fmt;

/// Operational failures. Mathematical verdicts, including negative ones,
/// are never errors.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or malformed input, or an invalid argument value.
    Parse(String),
    /// Inputs whose shapes do not fit together.
    Shape(String),
    /// Exact enumeration would exceed its cap and no fallback was allowed.
    Cap(String),
    /// Output could not be written.
    Io(String),
    /// Numerical failure inside an analysis.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Shape(_) => 3,
            CliError::Cap(_) => 4,
            CliError::Io(_) | CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "input error: {m}"),
            CliError::Shape(m) => write!(f, "dimension mismatch: {m}"),
            CliError::Cap(m) => {
                write!(f, "{m} (pass --numeric to fall back to the numeric search)")
            }
            CliError::Io(m) => write!(f, "output error: {m}"),
            CliError::Failed(m) => write!(f, "analysis failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<relugeo::Error> for CliError {
    fn from(e: relugeo::Error) -> Self {
        use relugeo::Error as E;
        match e {
            E::ShapeMismatch(_) => CliError::Shape(e.to_string()),
            E::CapExceeded { .. } => CliError::Cap(e.to_string()),
            E::InvalidInput(_) | E::NotSorted | E::DuplicateEntries | E::NotRealizable(_) => {
                CliError::Parse(e.to_string())
            }
            _ => CliError::Failed(e.to_string()),
        }
    }
}
