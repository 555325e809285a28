//! The relational reward language: a small, total, side-effect free
//! expression language over the objects of one snapshot.
//!
//! ```text
//! # bonus for touching the top edge
//! fn at_top(c: obj) -> bool: c.y <= 0.0
//!
//! reward(objects):
//!     if let c = first(filter_category(objects, "Chicken"))
//!     then (if at_top(c) then 1.0 else 0.0)
//!     else 0.0
//! ```

pub mod ast;
pub mod bounds;
pub mod diag;
pub mod eval;
pub mod fuzz;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod types;

pub use ast::{ProgramOrigin, RewardProgram, Type};
pub use bounds::{static_bounds, Interval};
pub use diag::{Diagnostic, Severity};
pub use eval::{evaluate, evaluate_objects, Evaluation};
pub use parser::parse;
pub use pretty::pretty_print;
pub use types::{lint, typecheck};

/// Parses and type checks. Warnings are not included; see [`lint`].
pub fn compile(source: &str) -> Result<RewardProgram, Vec<Diagnostic>> {
    let program = parse(source)?;
    let errors = typecheck(&program);
    if errors.is_empty() {
        Ok(program)
    } else {
        Err(errors)
    }
}
