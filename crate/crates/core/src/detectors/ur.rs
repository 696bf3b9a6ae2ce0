//! Unchecked return: a named result of a call that is never read.

use super::{DetectorId, Finding};
use crate::ir::{CallStyle, InstrKind, VarKind};
use crate::pipeline::UnitAnalysis;

pub(super) fn detect(ua: &UnitAnalysis) -> Vec<Finding> {
    let mut out = Vec::new();
    for (name, f) in &ua.functions {
        let uses = f.cfg.use_counts();
        for (_, i) in f.cfg.instructions() {
            let InstrKind::Call { dests, dest_spans, callee, style, .. } = &i.kind else { continue };
            for (k, d) in dests.iter().enumerate() {
                // The updated receiver of `x~f()` is not a return value.
                if *style == CallStyle::Modifying && k == 0 {
                    continue;
                }
                let info = f.cfg.var(*d);
                if matches!(info.kind, VarKind::Temp | VarKind::Discard) || info.name == "_" || uses[d.index()] > 0 {
                    continue;
                }
                let span = dest_spans.get(k).copied().unwrap_or(i.span);
                out.push(Finding::new(
                    DetectorId::Ur,
                    name,
                    span,
                    format!("result `{}` of `{}` is never used", info.name, callee.trim_start_matches('~')),
                    format!("{} has no uses", f.cfg.var_name(*d)),
                ));
            }
        }
    }
    out
}
