//! Bad randomness: logical time used as a random seed, or random values
//! derived from such a seed used in decisions.
//!
//! One finding per seeding call. Decisions taken on the resulting random
//! values are listed in its evidence rather than reported again; they are
//! reported on their own only when the seeding is not in the same function.

use super::{at, DetectorId, Finding};
use crate::analysis::{SinkKind, Taint};
use crate::pipeline::UnitAnalysis;

pub(super) fn detect(ua: &UnitAnalysis) -> Vec<Finding> {
    let mut out = Vec::new();
    for (name, f) in &ua.functions {
        let seeds: Vec<_> =
            f.sinks.iter().filter(|h| h.kind == SinkKind::SeedArg && h.taint.contains(Taint::LOGICAL_TIME)).collect();
        let uses: Vec<_> = f
            .sinks
            .iter()
            .filter(|h| {
                matches!(h.kind, SinkKind::Comparison | SinkKind::BranchCond | SinkKind::IndexAccess)
                    && h.taint.contains(Taint::RANDOMNESS)
            })
            .collect();
        let describe = |k: SinkKind| match k {
            SinkKind::Comparison => "a comparison",
            SinkKind::BranchCond => "a branch condition",
            _ => "an index",
        };
        if seeds.is_empty() {
            for hit in uses {
                out.push(Finding::new(
                    DetectorId::Br,
                    name,
                    hit.span,
                    format!("predictable random value used in {}", describe(hit.kind)),
                    "random value generated after seeding from logical time".to_string(),
                ));
            }
            continue;
        }
        let used: Vec<String> = uses.iter().map(|h| format!("{} at {}", describe(h.kind), at(h.span))).collect();
        for hit in seeds {
            let mut evidence = "seed derives from cur_lt/block_lt".to_string();
            if !used.is_empty() {
                evidence.push_str("; random value used in ");
                evidence.push_str(&used.join(", "));
            }
            out.push(Finding::new(
                DetectorId::Br,
                name,
                hit.span,
                "random generator seeded with logical time, which validators can predict".to_string(),
                evidence,
            ));
        }
    }
    out
}
