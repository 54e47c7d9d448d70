//! The Advanced Filters query language.
//!
//! ```text
//! style == "Cubism" AND (year >= 1900 OR title ~ portrait)
//! ```
//!
//! `AND` binds tighter than `OR`; both keywords are upper case only.
//! Comparisons are `==`, `!=`, `>`, `>=`, `<`, `<=` and `~` (substring,
//! case-insensitive). Empty input matches every object.

mod ast;
mod eval;
mod lexer;
mod parser;

use std::fmt;

pub use ast::{selection_query, CmpOp, Query, QueryAst};
pub use eval::{evaluate, matches_row, run_query, validate_fields, QueryError};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_query};

/// Syntax error with the character offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at {}: expected {}, found {}",
            self.position, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}
