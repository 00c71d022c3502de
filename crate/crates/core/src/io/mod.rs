//! File formats: scenarios, traces, reports and sweep tables.

use std::fmt;

use thiserror::Error;

pub mod report;
pub mod scenario;
pub mod table;
pub mod tracefile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadErrorKind {
    /// Not well-formed TOML or JSON, or a value of the wrong type.
    Parse,
    /// Well-formed but semantically invalid.
    Validation,
}

/// Diagnostic for a file that could not be loaded. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct LoadError {
    pub kind: LoadErrorKind,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl LoadError {
    pub fn parse(line: Option<usize>, field: Option<String>, message: String) -> Self {
        LoadError { kind: LoadErrorKind::Parse, line, field, message }
    }

    pub fn validation(line: Option<usize>, field: String, message: String) -> Self {
        LoadError { kind: LoadErrorKind::Validation, line, field: Some(field), message }
    }
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "{field}: ")?;
        }
        f.write_str(&self.message)
    }
}
