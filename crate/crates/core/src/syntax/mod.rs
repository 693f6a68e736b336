//! Concrete syntax for knowledge bases, concepts, queries, and reports.

mod lexer;
mod parser;
mod printer;

pub use lexer::ParseError;
pub use parser::{parse_concept, parse_labeled_kb, parse_ucq};
pub use printer::{render_concept, render_report, render_role, render_ucq};
