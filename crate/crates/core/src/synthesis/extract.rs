//! Pulling program text out of an assistant reply.

use crate::dsl::ast::Span;
use crate::dsl::diag::codes;
use crate::dsl::parser::parse_fragment;
use crate::dsl::Diagnostic;

/// Bodies of all fenced blocks, in order. An unterminated final fence
/// runs to the end of the message.
pub fn fenced_blocks(message: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in message.lines() {
        let fence = line.trim_start().starts_with("```");
        match (&mut current, fence) {
            (None, true) => current = Some(Vec::new()),
            (Some(lines), true) => {
                blocks.push(lines.join("\n"));
                current = None;
            }
            (Some(lines), false) => lines.push(line),
            (None, false) => {}
        }
    }
    if let Some(lines) = current {
        blocks.push(lines.join("\n"));
    }
    blocks
}

/// The last fenced block, or the whole message when it has no fence but
/// parses as program items.
pub fn extract_code(message: &str) -> Result<String, Diagnostic> {
    if let Some(last) = fenced_blocks(message).into_iter().rev().find(|b| !b.trim().is_empty()) {
        return Ok(last.trim_end().to_string() + "\n");
    }
    let trimmed = message.trim();
    if !trimmed.is_empty() {
        if let Ok(f) = parse_fragment(trimmed) {
            if !f.helpers.is_empty() || f.entry.is_some() {
                return Ok(trimmed.to_string() + "\n");
            }
        }
    }
    Err(Diagnostic::error(Span::new(1, 1, 1, 1), codes::NO_CODE, "no code found in the reply"))
}
