//! Unhandled bounced message: a bounceable message whose op code the
//! bounced branch of `recv_internal` never handles.

use std::collections::BTreeSet;

use super::{DetectorId, Finding};
use crate::analysis::{bounced_check, ConstEval, Effects};
use crate::cells::{Field, FieldKind, Layout, Width};
use crate::frontend::ast::BinaryOp;
use crate::ir::{Cfg, InstrKind, Loc, Operand, Rvalue, VarId};
use crate::pipeline::UnitAnalysis;

/// The 0xFFFFFFFF marker that prefixes bounced bodies.
const BOUNCE_MARKER: i128 = 0xFFFF_FFFF;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HandledOps {
    /// Op codes compared against in the bounced branch; empty when the
    /// branch returns straight away or does not exist.
    Explicit(BTreeSet<i128>),
    /// The branch does something non-trivial without dispatching on op
    /// codes, e.g. hands the body to a helper.
    Wildcard,
}

impl HandledOps {
    pub fn handles(&self, op: i128) -> bool {
        match self {
            HandledOps::Explicit(s) => s.contains(&op),
            HandledOps::Wildcard => true,
        }
    }
}

fn copy_source(cfg: &Cfg, defs: &[Option<Loc>], mut v: VarId) -> VarId {
    for _ in 0..16 {
        match defs[v.index()].map(|l| &cfg.instr(l).kind) {
            Some(InstrKind::Assign { rv: Rvalue::Use(Operand::Var(w)), .. }) => v = *w,
            _ => break,
        }
    }
    v
}

/// Whether `v` is the result of a 32-bit unsigned load.
fn is_op_load(cfg: &Cfg, defs: &[Option<Loc>], ev: &ConstEval, v: VarId) -> bool {
    let v = copy_source(cfg, defs, v);
    match defs[v.index()].map(|l| &cfg.instr(l).kind) {
        Some(InstrKind::Call { callee, args, dests, .. }) => {
            matches!(callee.trim_start_matches('~'), "load_uint" | "preload_uint")
                && args.get(1).and_then(|a| ev.operand(a)) == Some(32)
                && dests.last() == Some(&v)
        }
        _ => false,
    }
}

/// Op codes handled by the bounced-message branch of `recv_internal`.
pub fn handled_bounced_ops(ua: &UnitAnalysis) -> HandledOps {
    let empty = HandledOps::Explicit(BTreeSet::new());
    let Some(f) = ua.functions.get("recv_internal") else { return empty };
    let Some(check) = bounced_check(&f.cfg) else { return empty };
    let cfg = &f.cfg;
    let defs = cfg.def_sites();
    let ev = ConstEval::new(cfg);
    let mut ops = BTreeSet::new();
    let mut nontrivial = false;
    for b in f.dom.dominated_by(check.bounced_bb.index()) {
        for i in &cfg.blocks[b].instrs {
            match &i.kind {
                InstrKind::Assign { rv: Rvalue::Binary(BinaryOp::Eq, x, y), .. } => {
                    for (c, o) in [(x, y), (y, x)] {
                        let (Some(c), Some(v)) = (ev.operand(c), o.var()) else { continue };
                        if c != BOUNCE_MARKER && is_op_load(cfg, &defs, &ev, v) {
                            ops.insert(c);
                        }
                    }
                }
                InstrKind::Call { callee, .. } => {
                    let effects = ua.catalog.get(callee).map(|s| s.effects).unwrap_or_default();
                    let user = ua.functions.contains_key(callee.trim_start_matches('~'));
                    if user || effects.intersects(Effects::STORAGE_WRITE | Effects::MESSAGE_SEND | Effects::GLOBAL_WRITE) {
                        nontrivial = true;
                    }
                }
                InstrKind::SetGlob { .. } => nontrivial = true,
                _ => {}
            }
        }
    }
    if !ops.is_empty() {
        HandledOps::Explicit(ops)
    } else if nontrivial {
        HandledOps::Wildcard
    } else {
        empty
    }
}

/// The bounce flag from the leading constant header bits (`0x18` in six
/// bits is bounceable, `0x10` is not). `None` if fewer than three leading
/// bits are known.
pub fn header_bounceable(fields: &[Field]) -> Option<bool> {
    let mut pos = 0u32;
    for f in fields {
        let (FieldKind::Uint | FieldKind::Int, Width::Exact(w), Some(v)) = (f.kind, f.width, f.value) else { return None };
        if pos + w > 2 {
            let shift = w - 1 - (2 - pos);
            let bit = if shift >= 127 { v < 0 } else { (v >> shift) & 1 == 1 };
            return Some(bit);
        }
        pos += w;
    }
    None
}

/// Op code of an outgoing message: the first 32-bit field of the body in a
/// reference, or else the first 32-bit unsigned field after the amount.
pub fn sent_op(fields: &[Field]) -> Option<i128> {
    let coins = fields.iter().position(|f| f.kind == FieldKind::Coins)?;
    let rest = &fields[coins + 1..];
    if let Some(r) = rest.iter().rev().find(|f| f.kind == FieldKind::Ref) {
        let Some(Layout::Equal(body)) = r.nested.as_deref() else { return None };
        let first = body.first()?;
        return match (first.kind, first.width) {
            (FieldKind::Uint | FieldKind::Int, Width::Exact(32)) => first.value,
            _ => None,
        };
    }
    rest.iter().find(|f| f.kind == FieldKind::Uint && f.width == Width::Exact(32)).and_then(|f| f.value)
}

pub(super) fn detect(ua: &UnitAnalysis) -> Vec<Finding> {
    let handled = handled_bounced_ops(ua);
    let handled_text = match &handled {
        HandledOps::Explicit(s) if s.is_empty() => "no bounced op codes are handled".to_string(),
        HandledOps::Explicit(s) => {
            let list: Vec<String> = s.iter().map(|o| format!("0x{o:x}")).collect();
            format!("bounced handler covers {}", list.join(", "))
        }
        HandledOps::Wildcard => String::new(),
    };
    let mut out = Vec::new();
    for (name, f) in &ua.functions {
        for send in &f.cells.sends {
            let Some(alts) = send.layout.as_ref().and_then(Layout::alternatives) else { continue };
            for fields in alts {
                let bounce = header_bounceable(fields);
                if bounce == Some(false) {
                    continue;
                }
                let Some(op) = sent_op(fields) else { continue };
                if handled.handles(op) {
                    continue;
                }
                let flag = if bounce.is_some() { "bounce flag set in header" } else { "bounce flag assumed set" };
                out.push(Finding::new(
                    DetectorId::Ubm,
                    name,
                    send.span,
                    format!("bounceable message with op 0x{op:x} is not handled when it bounces"),
                    format!("{flag}; {handled_text}"),
                ));
            }
        }
    }
    out
}
