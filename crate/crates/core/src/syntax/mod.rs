//! Surface syntax of Automath books.
//!
//! Two dialects share one line format,
//! `[indicator] * identifier := content (;|:) category`:
//!
//! * `original`: `[x,A]B` abstraction (λ or Π, decided by elaboration),
//!   `<a>f` application with the argument first;
//! * `modern`: `\x:A. M`, `!x:A. B`, `A -> B` and juxtaposition `f a`.
//!
//! Both write instantiated constants as `c(L₁,…,Lₙ)`.

mod elab;
mod lexer;
mod parser;
mod print;

use std::fmt;

use thiserror::Error;

pub use elab::{complete_params, ElabError, ElabStats, Elaborator, Expected};
pub use parser::{parse_book, parse_expr, parse_line};
pub use print::{print_book, print_line, print_term, Notation};

pub(crate) use lexer::{lex_line, Tok};
pub(crate) use parser::Parser;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Dialect {
    #[default]
    Original,
    Modern,
}

impl std::str::FromStr for Dialect {
    type Err = String;
    fn from_str(s: &str) -> Result<Dialect, String> {
        match s {
            "original" => Ok(Dialect::Original),
            "modern" => Ok(Dialect::Modern),
            other => Err(format!("unknown dialect `{other}` (expected `original` or `modern`)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsFlavor {
    /// `[x,A]B`: λ or Π, resolved against the expected type.
    Ambiguous,
    Lambda,
    Pi,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceExpr {
    Ident(String),
    /// A sort keyword as written: `PROP`, `Prop`, `prop`, `set`, `*`, `Type` or `TYPE`.
    Sort(String),
    Abs { var: String, ann: Box<SurfaceExpr>, body: Box<SurfaceExpr>, flavor: AbsFlavor },
    /// `<arg>fun`.
    RevApp { arg: Box<SurfaceExpr>, fun: Box<SurfaceExpr> },
    /// `fun arg`.
    App { fun: Box<SurfaceExpr>, arg: Box<SurfaceExpr> },
    /// `c(L₁,…,Lₖ)`; possibly an incomplete parameter list.
    Inst { name: String, args: Vec<SurfaceExpr> },
}

impl SurfaceExpr {
    pub fn ident(x: &str) -> SurfaceExpr {
        SurfaceExpr::Ident(x.to_string())
    }
}

/// Binder name that can be written but never referenced (arrow sugar).
pub(crate) const WILDCARD: &str = "_";

pub(crate) fn is_sort_keyword(s: &str) -> bool {
    matches!(s, "PROP" | "Prop" | "prop" | "set" | "Type" | "TYPE")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct SourceLoc {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for SourceLoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawContent {
    /// `---`
    Dash,
    /// `PN`
    Primitive,
    Expr(SurfaceExpr),
}

/// One parsed, not yet elaborated, book line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawLine {
    pub indicator: Option<String>,
    pub identifier: String,
    pub content: RawContent,
    pub category: SurfaceExpr,
    pub loc: SourceLoc,
    pub content_loc: SourceLoc,
    pub category_loc: SourceLoc,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{loc}: {message}")]
pub struct ParseError {
    pub loc: SourceLoc,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError { loc: SourceLoc { line, col }, message: message.into() }
    }
}
