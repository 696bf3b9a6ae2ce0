//! Inconsistent data: persistent storage read back with a layout that
//! differs from the one written by `set_data`.

use super::{DetectorId, Finding};
use crate::cells::{layout_match, CellSource, Layout, MatchResult};
use crate::pipeline::UnitAnalysis;

pub(super) fn detect(ua: &UnitAnalysis) -> Vec<Finding> {
    let stored: Vec<&Layout> = ua
        .functions
        .values()
        .flat_map(|f| f.cells.stores.iter().filter_map(|s| s.layout.as_ref()))
        .collect();
    let mut out = Vec::new();
    if stored.is_empty() {
        return out;
    }
    // Layouts of the cell referenced by field `i` of the stored data.
    let nested = |i: usize| -> Vec<Layout> {
        let mut v = Vec::new();
        for l in &stored {
            for alt in l.alternatives().unwrap_or_default() {
                if let Some(n) = alt.get(i).and_then(|f| f.nested.as_deref()) {
                    if !v.contains(n) {
                        v.push(n.clone());
                    }
                }
            }
        }
        v
    };
    for (name, f) in &ua.functions {
        for ev in &f.cells.loads {
            let candidates: Vec<Layout> = match f.cells.roots[ev.root].source {
                CellSource::Storage => stored.iter().map(|l| (*l).clone()).collect(),
                CellSource::StorageRef(i) => nested(i),
                _ => continue,
            };
            let loaded_alts = ev.loaded();
            for layout in &candidates {
                let Some(stored_alts) = layout.alternatives() else { continue };
                let possible = stored_alts.len() > 1 || loaded_alts.len() > 1;
                let qualifier = if possible { " on some paths" } else { "" };
                for s in &stored_alts {
                    for l in &loaded_alts {
                        let (span, message, evidence) = match layout_match(s, l) {
                            MatchResult::Compatible => continue,
                            MatchResult::MismatchAt { index, stored, loaded } => (
                                loaded.span,
                                format!("stored {stored} but loaded {loaded} for field #{index}{qualifier}"),
                                format!("stored {stored}, loaded {loaded}"),
                            ),
                            MatchResult::LoadOverrun { index, loaded } => (
                                loaded.span,
                                format!("loaded {loaded} for field #{index} but only {} fields are stored{qualifier}", s.len()),
                                format!("stored <none>, loaded {loaded}"),
                            ),
                        };
                        out.push(Finding::new(DetectorId::Id, name, span, message, evidence));
                    }
                }
            }
        }
    }
    out
}
