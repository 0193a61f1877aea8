use std::fmt;

use thiserror::Error;

/// Symbol categories, used to name what was missing or duplicated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Prop,
    Agent,
    Action,
    Object,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Prop => "proposition",
            SymbolKind::Agent => "agent",
            SymbolKind::Action => "action",
            SymbolKind::Object => "object",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("undeclared {kind} `{name}`")]
    Undeclared { kind: SymbolKind, name: String },

    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: SymbolKind, name: String },

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("{path}:{line}: {message}")]
    File {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Attaches a file position to an error raised while reading a file.
    pub fn at_line(self, path: &str, line: usize) -> Self {
        match self {
            Error::File { .. } | Error::Unsupported(_) => self,
            other => Error::File {
                path: path.to_string(),
                line,
                message: other.to_string(),
            },
        }
    }

    /// True for errors caused by input outside a supported fragment rather
    /// than by malformed input.
    pub fn is_unsupported(&self) -> bool {
        matches!(self, Error::Unsupported(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
