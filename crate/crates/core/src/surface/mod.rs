//! Concrete syntax: lexing, parsing (with let sugar and hole auto-naming),
//! and printing.

use std::fmt;

mod lexer;
mod parser;
mod print;
mod tree;

pub use parser::{free_vars_to_holes, parse, parse_ty, parse_with, ParseOptions, Parsed};
pub use print::{print_ctx, print_env, print_ext, print_hole_ctx, print_int, print_ty};
pub use tree::int_tree;

/// Byte range in the source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    /// One-based line and column of the start.
    pub fn line_col(&self, src: &str) -> (usize, usize) {
        let upto = &src[..self.start.min(src.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

/// Spans of a term and its children, in the same child order the type
/// checker uses for error paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanTree {
    pub span: Span,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    pub fn leaf(span: Span) -> Self {
        SpanTree { span, children: Vec::new() }
    }

    pub fn node(span: Span, children: Vec<SpanTree>) -> Self {
        SpanTree { span, children }
    }

    /// The span at a child-index path.
    pub fn at(&self, path: &[usize]) -> Option<Span> {
        match path.split_first() {
            None => Some(self.span),
            Some((i, rest)) => self.children.get(*i)?.at(rest),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub span: Span,
}

impl ParseError {
    pub fn new(message: impl Into<String>, span: Span) -> Self {
        ParseError { message: message.into(), span }
    }

    /// `line:col: message`
    pub fn render(&self, src: &str) -> String {
        let (line, col) = self.span.line_col(src);
        format!("{line}:{col}: {}", self.message)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at byte {})", self.message, self.span.start)
    }
}

impl std::error::Error for ParseError {}
