//! Precision loss: a product whose factor comes from an earlier integer
//! division.

use std::collections::HashSet;

use super::{at, DetectorId, Finding};
use crate::frontend::ast::BinaryOp;
use crate::frontend::Span;
use crate::ir::{Cfg, InstrKind, Operand, Rvalue, VarId};
use crate::pipeline::UnitAnalysis;

/// Find a division feeding `v` through pure operators and φ nodes.
fn division_source(cfg: &Cfg, defs: &[Option<crate::ir::Loc>], v: VarId, seen: &mut HashSet<VarId>) -> Option<Span> {
    if !seen.insert(v) {
        return None;
    }
    let loc = defs[v.index()]?;
    let instr = cfg.instr(loc);
    match &instr.kind {
        InstrKind::Assign { rv, .. } => {
            if let Rvalue::Binary(op, ..) = rv {
                if op.is_division() {
                    return Some(instr.span);
                }
            }
            let ops: Vec<VarId> = match rv {
                Rvalue::Use(a) | Rvalue::Unary(_, a) | Rvalue::Project(a, _) => a.var().into_iter().collect(),
                Rvalue::Binary(_, a, b) => [a, b].into_iter().filter_map(Operand::var).collect(),
                Rvalue::Select(_, a, b) => [a, b].into_iter().filter_map(Operand::var).collect(),
                Rvalue::Tensor(_) | Rvalue::Tuple(_) => Vec::new(),
            };
            ops.into_iter().find_map(|o| division_source(cfg, defs, o, seen))
        }
        InstrKind::Phi { incoming, .. } => incoming.iter().find_map(|(_, x)| division_source(cfg, defs, *x, seen)),
        _ => None,
    }
}

pub(super) fn detect(ua: &UnitAnalysis) -> Vec<Finding> {
    let mut out = Vec::new();
    for (name, f) in &ua.functions {
        let defs = f.cfg.def_sites();
        for (_, i) in f.cfg.instructions() {
            let InstrKind::Assign { rv: Rvalue::Binary(BinaryOp::Mul, a, b), .. } = &i.kind else { continue };
            let div = [a, b]
                .into_iter()
                .filter_map(Operand::var)
                .find_map(|v| division_source(&f.cfg, &defs, v, &mut HashSet::new()));
            if let Some(d) = div {
                out.push(Finding::new(
                    DetectorId::Pl,
                    name,
                    i.span,
                    "multiplication after division loses precision; multiply first".into(),
                    format!("operand comes from the division at {}", at(d)),
                ));
            }
        }
    }
    out
}
