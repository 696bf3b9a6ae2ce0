//! Improper function modifier: a function with side effects that lacks
//! `impure`, so the compiler may drop calls whose result is unused.

use super::{DetectorId, Finding};
use crate::analysis::Effects;
use crate::ir::InstrKind;
use crate::pipeline::UnitAnalysis;

/// Entry points are invoked by the node, never dropped by the compiler.
const ENTRY_POINTS: [&str; 6] = ["recv_internal", "recv_external", "main", "run_ticktock", "split_prepare", "split_install"];

pub(super) fn detect(ua: &UnitAnalysis) -> Vec<Finding> {
    let mut out = Vec::new();
    for name in ua.functions.keys() {
        let Some(decl) = ua.decl(name) else { continue };
        if decl.modifiers.impure || decl.modifiers.method_id.is_some() || ENTRY_POINTS.contains(&name.as_str()) {
            continue;
        }
        let effects = ua.effects.get(name).copied().unwrap_or_default() & Effects::SIDE_EFFECTS;
        if effects.is_empty() {
            continue;
        }
        let sites = ua.callgraph.call_sites(name);
        let value_used = sites.iter().any(|(caller, loc)| {
            let Some(cf) = ua.functions.get(*caller) else { return false };
            let uses = cf.cfg.use_counts();
            match &cf.cfg.instr(*loc).kind {
                InstrKind::Call { dests, .. } => dests.iter().any(|d| uses[d.index()] > 0),
                _ => false,
            }
        });
        let droppable = decl.return_type.is_unit() || (!sites.is_empty() && !value_used);
        if !droppable {
            continue;
        }
        out.push(Finding::new(
            DetectorId::Ifm,
            name,
            decl.name_span,
            format!("`{name}` has side effects ({effects}) but is not declared impure"),
            format!("effects: {effects}; call sites: {}", sites.len()),
        ));
    }
    out
}
