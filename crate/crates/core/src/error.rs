//! Error types shared across the crate.
//!
//! Three failure families cover the library surface: invalid construction
//! parameters, incompatible shapes/grids between otherwise valid values, and
//! operations invoked on values that do not support them. The CLI adds I/O
//! and config-parsing wrappers so every command can funnel into one type.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameters that can never form a valid value (negative psd, odd
    /// length, probabilities not summing to one, ...).
    #[error("construction: {0}")]
    Construction(String),

    /// Two valid values whose shapes or grids are incompatible.
    #[error("shape: {0}")]
    Shape(String),

    /// An operation applied to a value that does not support it.
    #[error("usage: {0}")]
    Usage(String),

    /// Filesystem failures while reading configs or writing outputs.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed config or data files.
    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    pub fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_messages_carry_prefix_and_detail() {
        let e = Error::construction("length must be even");
        assert_eq!(e.to_string(), "construction: length must be even");
        let e = Error::shape("grid mismatch");
        assert_eq!(e.to_string(), "shape: grid mismatch");
        let e = Error::usage("correlation unsupported");
        assert_eq!(e.to_string(), "usage: correlation unsupported");
    }
}
