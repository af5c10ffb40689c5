use std::fmt;

use shlr::Error;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or argument values (exit 1).
    Usage(String),
    /// An input file is missing or unreadable (exit 2).
    MissingFile(String),
    /// Inputs disagree in shape (exit 3).
    Dimensions(String),
    /// The solver produced non-finite values (exit 4).
    Diverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::MissingFile(_) => 2,
            Self::Dimensions(_) => 3,
            Self::Diverged(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "{m}"),
            Self::MissingFile(m) => write!(f, "cannot read input: {m}"),
            Self::Dimensions(m) => write!(f, "dimension mismatch: {m}"),
            Self::Diverged(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io { .. }
            | Error::BadMagic { .. }
            | Error::Truncated { .. }
            | Error::DimOverflow { .. }
            | Error::BadPrecision { .. } => Self::MissingFile(msg),
            Error::ShapeMismatch(_) => Self::Dimensions(msg),
            Error::Divergence(_) => Self::Diverged(msg),
            Error::InvalidArgument(_) | Error::DegenerateCalibration(_) => Self::Usage(msg),
        }
    }
}
