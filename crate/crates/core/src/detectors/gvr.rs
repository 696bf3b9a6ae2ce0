//! Global variable redefinition: a parameter or local declared with the
//! name of a global, hiding it.

use super::{at, DetectorId, Finding};
use crate::frontend::ast::{Expr, ExprKind, FunctionDecl, StmtKind};
use crate::frontend::Span;
use crate::pipeline::UnitAnalysis;

fn shadowing_binders<'a>(e: &'a Expr, out: &mut Vec<(&'a str, Span)>) {
    e.walk(&mut |x| {
        let ExprKind::Decl { binder, .. } = &x.kind else { return };
        match &binder.kind {
            ExprKind::Ident(n) => out.push((n, x.span)),
            ExprKind::Tensor(items) | ExprKind::Tuple(items) => {
                for it in items {
                    if let ExprKind::Ident(n) = &it.kind {
                        out.push((n, it.span));
                    }
                }
            }
            _ => {}
        }
    });
}

fn declared_names(f: &FunctionDecl) -> Vec<(&str, Span)> {
    let mut out: Vec<(&str, Span)> = f.params.iter().filter_map(|p| p.name.as_deref().map(|n| (n, p.span))).collect();
    let Some(body) = f.block() else { return out };
    body.walk(&mut |s| {
        for e in s.exprs() {
            shadowing_binders(e, &mut out);
        }
        if let StmtKind::TryCatch { catch_args, .. } = &s.kind {
            for a in catch_args {
                if let ExprKind::Ident(n) = &a.kind {
                    out.push((n, a.span));
                }
            }
        }
    });
    out
}

pub(super) fn detect(ua: &UnitAnalysis) -> Vec<Finding> {
    let mut out = Vec::new();
    for f in &ua.unit.functions {
        if f.block().is_none() {
            continue;
        }
        for (name, span) in declared_names(f) {
            let Some(g) = ua.unit.global(name) else { continue };
            out.push(Finding::new(
                DetectorId::Gvr,
                &f.name,
                span,
                format!("local `{name}` shadows the global variable of the same name"),
                format!("global `{name}` declared at {}", at(g.span)),
            ));
        }
    }
    out
}
