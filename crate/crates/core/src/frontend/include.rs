use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::lexer::{tokenize, LexError, Token, TokenKind};
use super::span::{FileId, SourceMap, Span};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum IncludeError {
    #[error("cannot find included file `{path}`")]
    IncludeNotFound { path: String, span: Option<Span> },
    #[error("include cycle: {}", .chain.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(" -> "))]
    IncludeCycle { chain: Vec<PathBuf> },
}

/// Result of walking an entry file and everything it includes.
#[derive(Debug, Default)]
pub(crate) struct LoadedSources {
    pub sources: SourceMap,
    /// Files in dependency order (included files before their includers).
    pub order: Vec<FileId>,
    pub tokens: Vec<(FileId, Result<Vec<Token>, LexError>)>,
    pub errors: Vec<IncludeError>,
}

struct Resolver<'a> {
    include_dirs: &'a [PathBuf],
    strict: bool,
    visited: HashSet<PathBuf>,
    out: LoadedSources,
}

fn canonical(path: &Path) -> PathBuf {
    fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf())
}

impl Resolver<'_> {
    fn locate(&self, including: &Path, target: &str) -> Option<PathBuf> {
        let base = including.parent().unwrap_or_else(|| Path::new(""));
        std::iter::once(base.join(target))
            .chain(self.include_dirs.iter().map(|d| d.join(target)))
            .find(|p| p.is_file())
    }

    fn visit(&mut self, path: &Path, stack: &mut Vec<(PathBuf, PathBuf)>) -> Result<(), IncludeError> {
        let canon = canonical(path);
        if stack.iter().any(|(c, _)| *c == canon) {
            let mut chain: Vec<PathBuf> = stack
                .iter()
                .skip_while(|(c, _)| *c != canon)
                .map(|(_, shown)| shown.clone())
                .collect();
            chain.push(path.to_path_buf());
            return Err(IncludeError::IncludeCycle { chain });
        }
        if self.visited.contains(&canon) {
            return Ok(());
        }
        let text = fs::read_to_string(path)
            .map_err(|_| IncludeError::IncludeNotFound { path: path.display().to_string(), span: None })?;
        let id = self.out.sources.add(path, text);
        let lexed = tokenize(self.out.sources.get(id));
        let includes: Vec<(String, Span)> = match &lexed {
            Ok(tokens) => tokens
                .windows(2)
                .filter_map(|w| match (&w[0].kind, &w[1].kind) {
                    (TokenKind::Include, TokenKind::Str { value, .. }) => Some((value.clone(), w[0].span.to(w[1].span))),
                    _ => None,
                })
                .collect(),
            Err(_) => Vec::new(),
        };
        self.out.tokens.push((id, lexed));

        stack.push((canon.clone(), path.to_path_buf()));
        for (target, span) in includes {
            let result = match self.locate(path, &target) {
                Some(found) => self.visit(&found, stack),
                None => Err(IncludeError::IncludeNotFound { path: target, span: Some(span) }),
            };
            if let Err(e) = result {
                if self.strict {
                    stack.pop();
                    return Err(e);
                }
                if !self.out.errors.contains(&e) {
                    self.out.errors.push(e);
                }
            }
        }
        stack.pop();
        self.visited.insert(canon);
        self.out.order.push(id);
        Ok(())
    }
}

pub(crate) fn load_sources(entry: &Path, include_dirs: &[PathBuf], strict: bool) -> Result<LoadedSources, IncludeError> {
    let mut r = Resolver { include_dirs, strict, visited: HashSet::new(), out: LoadedSources::default() };
    let mut stack = Vec::new();
    match r.visit(entry, &mut stack) {
        Ok(()) => Ok(r.out),
        Err(e) if strict => Err(e),
        Err(e) => {
            r.out.errors.push(e);
            Ok(r.out)
        }
    }
}

/// Resolve `#include` directives depth-first starting at `entry`. Each file
/// appears once, after everything it includes. Paths are tried relative to
/// the including file first, then against each of `include_dirs`.
pub fn resolve_includes(entry: &Path, include_dirs: &[PathBuf]) -> Result<Vec<PathBuf>, IncludeError> {
    let loaded = load_sources(entry, include_dirs, true)?;
    Ok(loaded.order.iter().map(|id| loaded.sources.get(*id).path.clone()).collect())
}
