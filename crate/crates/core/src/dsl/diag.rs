use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Stable diagnostic codes.
pub mod codes {
    pub const SYNTAX: &str = "E001";
    pub const UNKNOWN_FUNCTION: &str = "E002";
    pub const UNKNOWN_FIELD: &str = "E003";
    pub const UNBOUND_NAME: &str = "E004";
    pub const TYPE_MISMATCH: &str = "E005";
    pub const ARITY: &str = "E006";
    pub const RECURSION: &str = "E007";
    pub const DUPLICATE: &str = "E008";
    pub const ENTRY: &str = "E009";
    pub const TRAP_ABSENT: &str = "T001";
    pub const TRAP_DIV_ZERO: &str = "T002";
    pub const TRAP_OVERFLOW: &str = "T003";
    pub const TRAP_NON_FINITE: &str = "T004";
    pub const FLOAT_EQUALITY: &str = "W001";
    pub const UNCLAMPED: &str = "W002";
    pub const NO_CODE: &str = "S001";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: u32,
    pub col_start: u32,
    pub col_end: u32,
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, code: &str, message: impl Into<String>) -> Self {
        Self::at(Severity::Error, span, code, message)
    }

    pub fn warning(span: Span, code: &str, message: impl Into<String>) -> Self {
        Self::at(Severity::Warning, span, code, message)
    }

    fn at(severity: Severity, span: Span, code: &str, message: impl Into<String>) -> Self {
        let col_end = if span.end_line == span.line && span.end_col > span.col {
            span.end_col
        } else {
            span.col + 1
        };
        Diagnostic {
            severity,
            line: span.line,
            col_start: span.col,
            col_end,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `severity file:line:col code message`
    pub fn render(&self, file: &str) -> String {
        format!("{} {}:{}:{} {} {}", self.severity, file, self.line, self.col_start, self.code, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("<input>"))
    }
}

/// Machine-readable form: a JSON array of diagnostics.
pub fn to_json(diags: &[Diagnostic]) -> String {
    serde_json::to_string_pretty(diags).expect("diagnostics serialize")
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
