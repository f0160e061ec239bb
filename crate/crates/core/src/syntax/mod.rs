//! Concrete syntax for the Twelf fragment: lexing, parsing and the raw
//! syntax tree handed to elaboration.

mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use parser::{parse_expr, parse_signature};

/// A 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at {span}: {message}")]
pub struct SyntaxError {
    pub span: Span,
    pub message: String,
}

/// Expression tree as written. Arrows are kept as `Pi` without a binder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawExpr {
    Type(Span),
    Ident(String, Span),
    Pi(Option<String>, Box<RawExpr>, Box<RawExpr>, Span),
    Lam(String, Box<RawExpr>, Box<RawExpr>, Span),
    App(Box<RawExpr>, Box<RawExpr>),
}

impl RawExpr {
    pub fn span(&self) -> Span {
        match self {
            RawExpr::Type(s) | RawExpr::Ident(_, s) | RawExpr::Pi(.., s) | RawExpr::Lam(.., s) => *s,
            RawExpr::App(f, _) => f.span(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDecl {
    pub name: String,
    pub expr: RawExpr,
    pub span: Span,
}
