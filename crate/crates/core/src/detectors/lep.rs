//! Lack of end_parse: a parsed slice that reaches a function exit without
//! `end_parse()` on some path.

use super::{at, DetectorId, Finding};
use crate::cells::EndParseStatus;
use crate::pipeline::UnitAnalysis;

pub(super) fn detect(ua: &UnitAnalysis) -> Vec<Finding> {
    let mut out = Vec::new();
    for (name, f) in &ua.functions {
        for (root, status) in f.cells.roots.iter().zip(&f.cells.end_parse) {
            let EndParseStatus::NotValidated { last_load } = status else { continue };
            out.push(Finding::new(
                DetectorId::Lep,
                name,
                *last_load,
                "slice is not checked with end_parse() after its last load".into(),
                format!("slice parsed at {} reaches a return without end_parse()", at(root.span)),
            ));
        }
    }
    out
}
