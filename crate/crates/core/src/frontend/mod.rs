//! FunC source loading: tokenizer, parser, `#include` resolution.

pub mod ast;
pub mod include;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod span;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use ast::SourceUnit;
pub use include::{resolve_includes, IncludeError};
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::{parse, ParseError};
pub use span::{FileId, SourceFile, SourceMap, Span};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FrontendError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Include(#[from] IncludeError),
}

impl FrontendError {
    pub fn span(&self) -> Option<Span> {
        match self {
            FrontendError::Lex(e) => Some(e.span()),
            FrontendError::Parse(e) => Some(e.span),
            FrontendError::Include(IncludeError::IncludeNotFound { span, .. }) => *span,
            FrontendError::Include(IncludeError::IncludeCycle { .. }) => None,
        }
    }

    /// Statement-level errors the parser recovered from.
    pub fn is_recovered(&self) -> bool {
        matches!(self, FrontendError::Parse(e) if e.recovered)
    }
}

/// Load `entry` and everything it includes into one [`SourceUnit`]. Errors
/// (missing includes, lexical or syntax errors) are collected in
/// `unit.errors`; whatever parsed successfully is still available.
pub fn load_unit(entry: &Path, include_dirs: &[PathBuf]) -> SourceUnit {
    let loaded = include::load_sources(entry, include_dirs, false).expect("lenient loading never fails");
    let mut unit = SourceUnit { sources: loaded.sources, ..SourceUnit::default() };
    unit.errors.extend(loaded.errors.into_iter().map(FrontendError::from));
    let mut tokens = loaded.tokens;
    for id in loaded.order {
        let idx = tokens.iter().position(|(fid, _)| *fid == id).expect("every loaded file was lexed");
        let (_, lexed) = tokens.swap_remove(idx);
        parse_into(&mut unit, id, lexed);
    }
    unit
}

/// Build a unit from in-memory text. `#include` directives are recorded but
/// not followed.
pub fn parse_source(path: impl Into<PathBuf>, text: impl Into<String>) -> SourceUnit {
    let mut unit = SourceUnit::default();
    let id = unit.sources.add(path, text);
    let lexed = tokenize(unit.sources.get(id));
    parse_into(&mut unit, id, lexed);
    unit
}

fn parse_into(unit: &mut SourceUnit, id: FileId, lexed: Result<Vec<Token>, LexError>) {
    match lexed {
        Ok(tokens) => {
            let (parsed, errors) = parse(unit.sources.get(id), &tokens);
            unit.errors.extend(errors.into_iter().map(FrontendError::from));
            unit.merge(parsed);
        }
        Err(e) => unit.errors.push(e.into()),
    }
}
