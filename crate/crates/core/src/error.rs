use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simulator building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid MCS index {0} (expected 0-9)")]
    InvalidMcs(u8),

    #[error("{what}: expected length {expected}, got {actual}")]
    SizeMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("noise variance must be positive, got {0}")]
    NonPositiveNoiseVariance(f64),

    #[error("degenerate channel realization: {0}")]
    DegenerateChannel(&'static str),

    #[error("degenerate precoder geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("invalid value for `{key}`: {msg}")]
    InvalidParameter { key: String, msg: String },

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the command-line tool: 2 configuration,
    /// 3 calibration, 4 I/O, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidMcs(_) | Error::InvalidParameter { .. } | Error::Config(_) => 2,
            Error::Calibration(_) => 3,
            Error::Io(_) => 4,
            _ => 1,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io(format!("{}: {err}", path.display()))
    }

    pub(crate) fn param(key: &str, msg: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    pub(crate) fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::SizeMismatch {
                what,
                expected,
                actual,
            })
        }
    }
}
